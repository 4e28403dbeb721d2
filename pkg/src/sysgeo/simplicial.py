"""Piecewise-flat simplicial complexes.

A complex is given by its maximal simplices; the face lattice is derived.
Metrics assign positive lengths to edges, and each simplex must embed as
a nondegenerate Euclidean simplex (positive-definite Gram matrix, which
is the Cayley-Menger nondegeneracy condition).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ComplexError",
    "MetricError",
    "SimplicialComplex",
    "PLMetric",
    "Chain",
    "CoverSpec",
    "GroupTable",
    "validate",
    "volume",
    "simplex_gram",
    "simplex_volume",
    "embed_simplex",
    "build_cover",
    "product_complex",
    "pullback_metric",
    "read_mesh",
    "format_mesh",
    "read_cover",
]


class ComplexError(ValueError):
    pass


class MetricError(ValueError):
    pass


def _parity(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


class SimplicialComplex:
    """Finite simplicial complex on vertices 0..V-1, closed under faces."""

    def __init__(self, n_vertices: int, maximal_simplices):
        self.n_vertices = int(n_vertices)
        maxi = sorted({tuple(sorted(s)) for s in maximal_simplices})
        if not maxi:
            raise ComplexError("no simplices")
        for s in maxi:
            if len(set(s)) != len(s):
                raise ComplexError(f"repeated vertex in simplex {s}")
            if s[0] < 0 or s[-1] >= self.n_vertices:
                raise ComplexError(f"vertex out of range in simplex {s}")
        self.dim = max(len(s) for s in maxi) - 1
        faces: list[set] = [set() for _ in range(self.dim + 1)]
        for s in maxi:
            for k in range(1, len(s) + 1):
                for f in itertools.combinations(s, k):
                    faces[k - 1].add(f)
        # isolated vertices are not representable; every vertex must occur
        seen = {v for s in maxi for v in s}
        if seen != set(range(self.n_vertices)):
            raise ComplexError("every vertex must belong to some simplex")
        self._faces = [sorted(fs) for fs in faces]
        self._index = [{s: i for i, s in enumerate(fs)} for fs in self._faces]
        self.maximal = maxi

    # -- face access --------------------------------------------------------

    def simplices(self, k: int):
        if k < 0 or k > self.dim:
            return []
        return self._faces[k]

    def index(self, simplex) -> int:
        s = tuple(sorted(simplex))
        return self._index[len(s) - 1][s]

    def has_simplex(self, simplex) -> bool:
        s = tuple(sorted(simplex))
        k = len(s) - 1
        return 0 <= k <= self.dim and s in self._index[k]

    @property
    def edges(self):
        return self.simplices(1)

    def n_simplices(self, k: int) -> int:
        return len(self.simplices(k))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.n_simplices(k) for k in range(self.dim + 1))

    # -- boundary operators -------------------------------------------------

    def boundary_matrix(self, k: int):
        """Integer matrix of the boundary C_k -> C_{k-1} (lists of rows)."""
        if k <= 0:
            return [[0] * self.n_simplices(max(k, 0))]
        rows = self.n_simplices(k - 1)
        cols = self.n_simplices(k)
        M = [[0] * cols for _ in range(rows)]
        if k > self.dim:
            return M
        for j, s in enumerate(self.simplices(k)):
            for i, v in enumerate(s):
                face = s[:i] + s[i + 1 :]
                M[self._index[k - 1][face]][j] += (-1) ** i
        return M

    # -- structure checks ---------------------------------------------------

    def is_connected(self) -> bool:
        parent = list(range(self.n_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            parent[find(u)] = find(v)
        roots = {find(v) for v in range(self.n_vertices)}
        return len(roots) == 1

    def is_pure(self) -> bool:
        return all(len(s) == self.dim + 1 for s in self.maximal)

    def pseudomanifold_defects(self):
        """(n-1)-simplices not shared by exactly two n-simplices."""
        if not self.is_pure():
            return list(self.simplices(self.dim - 1))
        count = {f: 0 for f in self.simplices(self.dim - 1)}
        for s in self.maximal:
            for i in range(len(s)):
                count[s[:i] + s[i + 1 :]] += 1
        return [f for f, c in count.items() if c != 2]

    def is_closed_manifold(self) -> bool:
        return self.is_pure() and not self.pseudomanifold_defects()

    def is_orientable(self) -> bool:
        """Try to orient the top simplices coherently (spanning tree walk)."""
        if not self.is_closed_manifold():
            return False
        n = self.dim
        top = self.maximal
        idx = {s: i for i, s in enumerate(top)}
        adj: dict = {}
        for s in top:
            for i in range(len(s)):
                adj.setdefault(s[:i] + s[i + 1 :], []).append(s)
        orient = {0: 1}
        stack = [0]
        while stack:
            i = stack.pop()
            s = top[i]
            for a in range(n + 1):
                face = s[:a] + s[a + 1 :]
                for t in adj[face]:
                    j = idx[t]
                    if t == s:
                        continue
                    b = next(p for p, v in enumerate(t) if v not in face)
                    # coherent: induced orientations on the shared face oppose
                    rel = -((-1) ** a) * ((-1) ** b)
                    if j in orient:
                        if orient[j] != rel * orient[i]:
                            return False
                    else:
                        orient[j] = rel * orient[i]
                        stack.append(j)
        return len(orient) == len(top)


class PLMetric:
    """Edge lengths on a complex; immutable after construction."""

    def __init__(self, lengths: dict):
        self._len = {tuple(sorted(e)): float(l) for e, l in lengths.items()}
        for e, l in self._len.items():
            if not l > 0:
                raise MetricError(f"edge {e} has nonpositive length {l}")

    def length(self, u, v) -> float:
        if u == v:
            return 0.0
        return self._len[(u, v) if u < v else (v, u)]

    def items(self):
        return self._len.items()

    def min_length(self) -> float:
        return min(self._len.values())

    def scaled(self, c: float) -> "PLMetric":
        return PLMetric({e: c * l for e, l in self._len.items()})

    def covers(self, complex_: SimplicialComplex) -> bool:
        return all(e in self._len for e in complex_.edges)


@dataclass
class Chain:
    """Simplicial (co)chain: degree, coefficient ring tag, simplex -> coeff.

    Coefficients are stored on sorted vertex tuples; assigning through an
    odd permutation flips the sign for rings Z and R.
    """

    degree: int
    ring: str  # "Z" | "Z2" | "R"
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for s, c in self.data.items():
            key = tuple(sorted(s))
            if len(key) != self.degree + 1:
                raise ComplexError(f"simplex {s} has wrong degree")
            if self.ring != "Z2":
                order = [key.index(v) for v in s]
                c = c * _parity(order)
            else:
                c = c % 2
            if c:
                clean[key] = clean.get(key, 0) + c
        self.data = {s: c for s, c in clean.items() if c}

    def coeff(self, s):
        key = tuple(sorted(s))
        c = self.data.get(key, 0)
        if self.ring != "Z2" and c:
            c = c * _parity([key.index(v) for v in s])
        return c


@dataclass
class GroupTable:
    """Finite group given by its multiplication table: table[a][b] = a*b."""

    table: list

    def __post_init__(self):
        n = len(self.table)
        for row in self.table:
            if len(row) != n or sorted(row) != list(range(n)):
                raise ComplexError("multiplication table rows must be permutations")
        ident = None
        for e in range(n):
            if all(self.table[e][g] == g and self.table[g][e] == g for g in range(n)):
                ident = e
                break
        if ident is None:
            raise ComplexError("multiplication table has no identity")
        self.identity = ident
        self.inv = [None] * n
        for a in range(n):
            for b in range(n):
                if self.table[a][b] == ident:
                    self.inv[a] = b
        if any(v is None for v in self.inv):
            raise ComplexError("multiplication table has no inverses")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a, b):
        return self.table[a][b]

    @classmethod
    def cyclic(cls, m: int) -> "GroupTable":
        return cls([[(a + b) % m for b in range(m)] for a in range(m)])


@dataclass
class CoverSpec:
    """Regular cover given by a flat edge coloring into a finite group.

    color[(u, v)] (u < v) is the transport from u to v; flatness means the
    ordered product around every 2-simplex boundary is the identity.
    """

    group: GroupTable
    color: dict

    def __post_init__(self):
        self.color = {tuple(sorted(e)): int(g) for e, g in self.color.items()}

    def transport(self, u, v):
        if u == v:
            return self.group.identity
        g = self.color[(u, v) if u < v else (v, u)]
        return g if u < v else self.group.inv[g]

    def check_flat(self, complex_: SimplicialComplex):
        for e in complex_.edges:
            if e not in self.color:
                raise ComplexError(f"edge {e} has no color")
        bad = []
        for (a, b, c) in complex_.simplices(2):
            g = self.group.mul(self.transport(a, b), self.transport(b, c))
            if g != self.transport(a, c):
                bad.append((a, b, c))
        if bad:
            raise ComplexError(f"coloring is not flat on triangles {bad[:5]}")


# ---------------------------------------------------------------------------
# Metric geometry of single simplices


def simplex_gram(simplex, metric: PLMetric) -> np.ndarray:
    """Gram matrix of edge vectors v_i - v_0 from the edge lengths."""
    s = tuple(simplex)
    k = len(s) - 1
    G = np.empty((k, k))
    for i in range(k):
        li = metric.length(s[0], s[i + 1])
        for j in range(i, k):
            lj = metric.length(s[0], s[j + 1])
            lij = metric.length(s[i + 1], s[j + 1])
            G[i, j] = G[j, i] = 0.5 * (li * li + lj * lj - lij * lij)
    return G


def simplex_volume(simplex, metric: PLMetric) -> float:
    """Euclidean k-volume of a flat simplex (Cayley-Menger determinant)."""
    k = len(simplex) - 1
    if k == 0:
        return 1.0
    G = simplex_gram(simplex, metric)
    det = np.linalg.det(G)
    if det <= 0:
        raise MetricError(f"simplex {tuple(simplex)} is degenerate (det {det:g})")
    return math.sqrt(det) / math.factorial(k)


def simplex_is_nondegenerate(simplex, metric: PLMetric, margin: float = 0.0) -> bool:
    G = simplex_gram(simplex, metric)
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        return False
    if margin > 0:
        scale = max(l * l for l in (metric.length(simplex[0], v) for v in simplex[1:]))
        return np.linalg.det(G) > margin * scale ** (len(simplex) - 1)
    return True


def embed_simplex(simplex, metric: PLMetric) -> np.ndarray:
    """Coordinates of the simplex vertices in R^k (first vertex at 0)."""
    k = len(simplex) - 1
    G = simplex_gram(simplex, metric)
    L = np.linalg.cholesky(G)
    pts = np.zeros((k + 1, k))
    pts[1:] = L
    return pts


# ---------------------------------------------------------------------------
# Whole-complex operations


@dataclass
class Diagnostics:
    closed_under_faces: bool
    connected: bool
    pure: bool
    pseudomanifold: bool
    orientable: bool | None
    metric_ok: bool
    violations: list
    n_simplices: list


def validate(X: SimplicialComplex, g: PLMetric | None = None) -> Diagnostics:
    """Structural and metric diagnostics; violations listed, never repaired."""
    violations = []
    pm_defects = X.pseudomanifold_defects()
    pseudo = not pm_defects
    if pm_defects:
        violations.append(("pseudomanifold", pm_defects[0]))
    connected = X.is_connected()
    if not connected:
        violations.append(("disconnected", None))
    metric_ok = True
    if g is not None:
        missing = [e for e in X.edges if not _has_len(g, e)]
        if missing:
            metric_ok = False
            violations.append(("missing-edge-length", missing[0]))
        else:
            for s in X.maximal:
                if len(s) >= 2 and not simplex_is_nondegenerate(s, g):
                    metric_ok = False
                    violations.append(("cayley-menger", s))
                    break
    orientable = X.is_orientable() if pseudo else None
    return Diagnostics(
        closed_under_faces=True,  # faces are derived, closure holds by construction
        connected=connected,
        pure=X.is_pure(),
        pseudomanifold=pseudo,
        orientable=orientable,
        metric_ok=metric_ok,
        violations=violations,
        n_simplices=[X.n_simplices(k) for k in range(X.dim + 1)],
    )


def _has_len(g: PLMetric, e) -> bool:
    try:
        g.length(*e)
        return True
    except KeyError:
        return False


def volume(X: SimplicialComplex, g: PLMetric) -> float:
    """Total n-volume: sum of flat simplex volumes of the top dimension."""
    return sum(simplex_volume(s, g) for s in X.simplices(X.dim))


def build_cover(X: SimplicialComplex, g: PLMetric, spec: CoverSpec):
    """|B|-sheeted cover from a flat coloring.

    Returns (cover complex, cover metric, info) where info reports the
    connected-component count and the vertex map (v, sheet) -> vertex id.
    """
    spec.check_flat(X)
    B = spec.group
    m = B.order

    def vid(v, s):
        return v * m + s

    lifted = []
    for simplex in X.maximal:
        v0 = simplex[0]
        for sheet in range(m):
            lifted.append(
                tuple(vid(v, B.mul(sheet, spec.transport(v0, v))) for v in simplex)
            )
    cover = SimplicialComplex(X.n_vertices * m, lifted)
    lengths = {}
    for (u, v) in cover.edges:
        lengths[(u, v)] = g.length(u // m, v // m)
    gc = PLMetric(lengths)
    # component count
    parent = list(range(X.n_vertices * m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in cover.edges:
        parent[find(u)] = find(v)
    comps = len({find(v) for v in range(X.n_vertices * m)})
    info = {"components": comps, "sheets": m, "vertex_id": vid}
    return cover, gc, info


def product_complex(X, gX, Y, gY):
    """Staircase (Eilenberg-Zilber) triangulation of X x Y with the
    orthogonal product metric."""
    VY = Y.n_vertices

    def vid(a, b):
        return a * VY + b

    maximal = set()
    for sx in X.maximal:
        p = len(sx) - 1
        for sy in Y.maximal:
            q = len(sy) - 1
            for path in itertools.combinations(range(p + q), p):
                verts = []
                i = j = 0
                verts.append(vid(sx[0], sy[0]))
                for step in range(p + q):
                    if step in path:
                        i += 1
                    else:
                        j += 1
                    verts.append(vid(sx[i], sy[j]))
                maximal.add(tuple(verts))
    prod = SimplicialComplex(X.n_vertices * VY, maximal)
    lengths = {}
    for (u, v) in prod.edges:
        ax, bx = divmod(u, VY)
        ay, by = divmod(v, VY)
        dx = gX.length(ax, ay) if ax != ay else 0.0
        dy = gY.length(bx, by) if bx != by else 0.0
        lengths[(u, v)] = math.hypot(dx, dy)
    return prod, PLMetric(lengths)


@dataclass
class PullbackResult:
    metric: PLMetric
    inflation: float  # max edge-length ratio applied by the repair
    shift: float  # quadrature shift s used (0 when no repair was needed)


def pullback_metric(f: dict, X: SimplicialComplex, Y: SimplicialComplex,
                    gY: PLMetric, eps: float) -> PullbackResult:
    """Pull edge lengths of Y back along a simplicial map f: X -> Y.

    Collapsed edges get eps * (min edge length of gY).  If some simplex is
    degenerate, all lengths l are replaced by sqrt(l^2 + s^2) with the
    smallest s (binary search) making every Gram matrix positive definite;
    plain uniform scaling cannot repair degeneracy since Cayley-Menger
    signs are scale invariant.
    """
    if eps <= 0:
        raise MetricError("eps must be positive")
    for v in range(X.n_vertices):
        if v not in f:
            raise ComplexError(f"vertex {v} has no image")
    for s in X.maximal:
        img = tuple(sorted(set(f[v] for v in s)))
        if not Y.has_simplex(img):
            raise ComplexError(f"image of simplex {s} is not a simplex of Y")
    floor = eps * gY.min_length()
    base = {}
    for (u, v) in X.edges:
        fu, fv = f[u], f[v]
        base[(u, v)] = gY.length(fu, fv) if fu != fv else floor

    def metric_at(s):
        if s == 0.0:
            return PLMetric(base)
        return PLMetric({e: math.hypot(l, s) for e, l in base.items()})

    def ok(s):
        m = metric_at(s)
        return all(simplex_is_nondegenerate(t, m, margin=1e-14) for t in X.maximal)

    if ok(0.0):
        return PullbackResult(metric_at(0.0), 1.0, 0.0)
    hi = floor
    while not ok(hi):
        hi *= 2.0
        if hi > 1e6 * max(l for _, l in gY.items()):
            raise MetricError("cannot repair degenerate pullback metric")
    lo = 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    s = hi
    metric = metric_at(s)
    inflation = max(metric.length(*e) / base[tuple(sorted(e))] for e in X.edges)
    return PullbackResult(metric, inflation, s)


# ---------------------------------------------------------------------------
# IO


def read_mesh(text: str):
    """Parse the mesh text format; returns (complex, metric)."""
    dim = None
    nv = None
    simplices = []
    lengths = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        tok = ln.split()
        if tok[0] == "dim":
            dim = int(tok[1])
        elif tok[0] == "vertices":
            nv = int(tok[1])
        elif tok[0] == "simplex":
            simplices.append(tuple(int(t) for t in tok[1:]))
        elif tok[0] == "edgelen":
            u, v = int(tok[1]), int(tok[2])
            e = (u, v) if u < v else (v, u)
            if e in lengths:
                raise ComplexError(f"edge {e} listed twice")
            lengths[e] = float(tok[3])
        else:
            raise ComplexError(f"unknown statement {tok[0]!r}")
    if nv is None or not simplices:
        raise ComplexError("mesh must declare vertices and simplices")
    X = SimplicialComplex(nv, simplices)
    if dim is not None and X.dim != dim:
        raise ComplexError(f"declared dim {dim} but maximal simplices have dim {X.dim}")
    for e in X.edges:
        if e not in lengths:
            raise ComplexError(f"edge {e} has no edgelen")
    extra = set(lengths) - set(X.edges)
    if extra:
        raise ComplexError(f"edgelen for non-edge {sorted(extra)[0]}")
    return X, PLMetric(lengths)


def format_mesh(X: SimplicialComplex, g: PLMetric) -> str:
    out = [f"dim {X.dim}", f"vertices {X.n_vertices}"]
    for s in X.maximal:
        out.append("simplex " + " ".join(map(str, s)))
    for (u, v) in X.edges:
        out.append(f"edgelen {u} {v} {g.length(u, v):.17g}")
    return "\n".join(out) + "\n"


def read_cover(text: str) -> CoverSpec:
    """Parse a cover coloring file: 'group k', k table rows, 'color u v g'."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("group"):
        raise ComplexError("expected 'group k' header")
    k = int(lines[0].split()[1])
    table = [[int(t) for t in lines[1 + i].split()] for i in range(k)]
    color = {}
    for ln in lines[1 + k :]:
        tok = ln.split()
        if tok[0] != "color":
            raise ComplexError(f"unknown statement {tok[0]!r}")
        color[(int(tok[1]), int(tok[2]))] = int(tok[3])
    return CoverSpec(GroupTable(table), color)
