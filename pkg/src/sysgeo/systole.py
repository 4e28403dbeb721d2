"""One-dimensional systoles.

Homology 1-systoles are exact shortest-path searches on holonomy-labeled
covering graphs.  The stable norm is a mass-minimizing linear program
over real edge cycles with a prescribed class, returned together with an
LP-dual unit-comass cocycle certificate.  The homotopy systole ships as
a cover-based surrogate with explicit exactness semantics (the word
problem blocks a general algorithm).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .homology import QuotientPresentation, h1_dual_bases, z2_homology
from .simplicial import ComplexError, CoverSpec, PLMetric, SimplicialComplex

__all__ = [
    "SystoleValue",
    "StableNormValue",
    "sysh1",
    "pisys1_upper",
    "stable_norm",
    "stsys1",
    "sys1_aggregate",
    "sysk_aggregate",
]

INF = math.inf


@dataclass
class SystoleValue:
    value: float
    witness: list | None = None  # vertex loop [v0, v1, ..., v0] or face list
    exactness: str = "exact"  # "exact" | "upper-bound" | "lower-bound"
    provenance: str = ""

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass
class StableNormValue:
    class_coords: tuple
    value: float
    cycle: np.ndarray  # real edge 1-cycle attaining the value
    cocycle: np.ndarray  # unit-comass dual certificate
    dual_value: float

    @property
    def duality_gap(self) -> float:
        scale = max(abs(self.value), abs(self.dual_value), 1.0)
        return abs(self.value - self.dual_value) / scale


# ---------------------------------------------------------------------------
# Labeled shortest loop search


def _adjacency(X: SimplicialComplex, g: PLMetric):
    adj = [[] for _ in range(X.n_vertices)]
    for idx, (u, v) in enumerate(X.edges):
        l = g.length(u, v)
        adj[u].append((v, idx, +1, l))
        adj[v].append((u, idx, -1, l))
    return adj


def _shortest_nontrivial_loop(X, g, label, combine, identity, upper=INF):
    """Shortest closed edge loop whose accumulated label is not the identity.

    label(edge_index, sign) -> group element; combine(h, l) -> h * l.
    Runs a pruned Dijkstra on the labeled cover from every base vertex.
    Returns (length, vertex loop) or (inf, None).
    """
    adj = _adjacency(X, g)
    best = upper
    best_loop = None
    for v0 in range(X.n_vertices):
        start = (v0, identity)
        dist = {start: 0.0}
        prev = {}
        pq = [(0.0, start)]
        while pq:
            d, state = heapq.heappop(pq)
            if d > dist.get(state, INF) or d >= best:
                continue
            v, h = state
            for (w, idx, sign, l) in adj[v]:
                nh = combine(h, label(idx, sign))
                nd = d + l
                if nd >= best:
                    continue
                if w == v0 and nh != identity:
                    best = nd
                    trail = []
                    s = state
                    while s in prev:
                        trail.append(s[0])
                        s = prev[s]
                    trail.append(s[0])
                    best_loop = trail[::-1] + [w]
                ns = (w, nh)
                if nd < dist.get(ns, INF):
                    dist[ns] = nd
                    prev[ns] = state
                    heapq.heappush(pq, (nd, ns))
    return best if best < upper else INF, best_loop


def _z2_labels(X: SimplicialComplex):
    """Edge -> GF(2)^d signature from a cocycle basis of H^1(X; Z2)."""
    z2 = z2_homology(X, 1)
    if z2.dim == 0:
        return None
    cols = z2.cocycle_reps.T  # n_edges x d
    return [tuple(int(b) for b in cols[i]) for i in range(cols.shape[0])], z2.dim


def _z_labels(X: SimplicialComplex):
    """Edge labels carrying (free H_1 coords, torsion coords) of loops.

    Free coordinates come from an integral cocycle basis (path-additive).
    Torsion coordinates use a spanning tree: tree edges are trivial, each
    non-tree edge carries the torsion class of its fundamental loop.
    """
    cycles, cocycles, pres = h1_dual_bases(X)
    b = len(cycles)
    tor = pres.torsion
    edges = X.edges
    eidx = {e: i for i, e in enumerate(edges)}
    # spanning tree (BFS)
    tree_parent = {0: None}
    order = [0]
    adj = [[] for _ in range(X.n_vertices)]
    for (u, v) in edges:
        adj[u].append(v)
        adj[v].append(u)
    import collections

    dq = collections.deque([0])
    while dq:
        u = dq.popleft()
        for w in adj[u]:
            if w not in tree_parent:
                tree_parent[w] = u
                order.append(w)
                dq.append(w)
    tree_edges = {tuple(sorted((v, p))) for v, p in tree_parent.items() if p is not None}

    def tree_path_vector(u, v):
        """Oriented edge vector of the tree path u -> v."""
        vec = [0] * len(edges)

        def chain(a):
            out = [a]
            while tree_parent[a] is not None:
                a = tree_parent[a]
                out.append(a)
            return out

        cu = chain(u)
        cv = chain(v)
        while len(cu) > 1 and len(cv) > 1 and cu[-1] == cv[-1] and cu[-2] == cv[-2]:
            cu.pop()
            cv.pop()
        # path = (u -> ancestor) followed by reversed (v -> ancestor)
        for a, bnd in zip(cu, cu[1:]):
            i = eidx[tuple(sorted((a, bnd)))]
            vec[i] += 1 if a < bnd else -1
        for a, bnd in zip(cv, cv[1:]):
            i = eidx[tuple(sorted((a, bnd)))]
            vec[i] -= 1 if a < bnd else -1
        return vec

    tor_label = {}
    if tor:
        for i, e in enumerate(edges):
            if e in tree_edges:
                continue
            u, v = e
            vec = tree_path_vector(v, u)
            vec[i] += 1
            c = pres.coords(vec)
            tor_label[i] = c[1]
    moduli = tuple(tor)
    d_free = b

    def label(idx, sign):
        free = tuple(sign * w[idx] for w in cocycles)
        t = tor_label.get(idx)
        if t is None:
            tcoords = (0,) * len(moduli)
        else:
            tcoords = tuple((sign * x) % m for x, m in zip(t, moduli))
        return free, tcoords

    identity = ((0,) * d_free, (0,) * len(moduli))

    def combine(h, l):
        return (
            tuple(a + c for a, c in zip(h[0], l[0])),
            tuple((a + c) % m for a, c, m in zip(h[1], l[1], moduli)),
        )

    nontrivial = d_free > 0 or len(moduli) > 0
    return label, combine, identity, nontrivial


def sysh1(X: SimplicialComplex, g: PLMetric, ring: str = "Z") -> SystoleValue:
    """Exact shortest edge loop with nonzero class in H_1(X; ring)."""
    if ring == "Z2":
        lab = _z2_labels(X)
        if lab is None:
            return SystoleValue(INF, None, "exact", "H_1(X;Z2) = 0; empty infimum")
        labels, d = lab
        zero = (0,) * d

        def label(idx, sign):
            return labels[idx]

        def combine(h, l):
            return tuple(a ^ b for a, b in zip(h, l))

        val, loop = _shortest_nontrivial_loop(X, g, label, combine, zero)
        return SystoleValue(val, loop, "exact", "Z2 signature cover search")
    if ring != "Z":
        raise ComplexError(f"unsupported ring {ring!r}")
    label, combine, identity, nontrivial = _z_labels(X)
    if not nontrivial:
        return SystoleValue(INF, None, "exact", "H_1(X;Z) = 0; empty infimum")
    val, loop = _shortest_nontrivial_loop(X, g, label, combine, identity)
    return SystoleValue(val, loop, "exact", "H_1(Z) holonomy cover search")


def pisys1_upper(
    X: SimplicialComplex,
    g: PLMetric,
    covers: list[CoverSpec] | None = None,
    complete: bool = False,
) -> SystoleValue:
    """Shortest loop with a non-closed lift to a listed cover or the H_1-cover.

    Always an upper bound for the homotopy 1-systole; exact only when the
    caller asserts the covers realize the full fundamental group.
    """
    candidates = []
    base = sysh1(X, g, "Z")
    if base.finite:
        candidates.append((base.value, base.witness, "H_1 cover"))
    for spec in covers or []:
        spec.check_flat(X)
        B = spec.group
        edges = X.edges
        colors = [spec.color[e] for e in edges]

        def label(idx, sign, colors=colors, B=B):
            c = colors[idx]
            return c if sign > 0 else B.inv[c]

        def combine(h, l, B=B):
            return B.mul(h, l)

        val, loop = _shortest_nontrivial_loop(X, g, label, combine, B.identity)
        if math.isfinite(val):
            candidates.append((val, loop, "cover coloring"))
    if not candidates:
        return SystoleValue(
            INF, None, "exact" if complete else "upper-bound",
            "no non-closed lift in any listed cover",
        )
    val, loop, src = min(candidates, key=lambda t: t[0])
    return SystoleValue(
        val, loop, "exact" if complete else "upper-bound",
        f"non-closed lift witness via {src}",
    )


# ---------------------------------------------------------------------------
# Stable norm


def _class_system(X: SimplicialComplex):
    cycles, cocycles, pres = h1_dual_bases(X)
    return cycles, cocycles, pres


def stable_norm(X: SimplicialComplex, g: PLMetric, alpha) -> StableNormValue:
    """Minimum mass of a real edge 1-cycle with class alpha (free H_1 coords).

    Solved as a linear program; by homogeneity of mass the LP value equals
    the stable norm of the discrete metric.  Returns the primal minimizer
    and the LP-dual closed cocycle with unit edge-comass.
    """
    edges = X.edges
    ne = len(edges)
    lengths = np.array([g.length(u, v) for (u, v) in edges])
    cycles, cocycles, _ = _class_system(X)
    b = len(cycles)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != b:
        raise ComplexError(f"class has {len(alpha)} coords, expected {b}")
    d1 = np.array(X.boundary_matrix(1), dtype=float)  # V x E
    omega = np.array(cocycles, dtype=float) if b else np.zeros((0, ne))
    A = np.vstack([d1, omega])
    rhs = np.concatenate([np.zeros(d1.shape[0]), np.array(alpha, dtype=float)])
    # variables: c = p - n with p, n >= 0
    c_obj = np.concatenate([lengths, lengths])
    A_eq = np.hstack([A, -A])
    res = linprog(c_obj, A_eq=A_eq, b_eq=rhs, bounds=(0, None), method="highs")
    if res.status != 0:
        raise ComplexError(f"stable norm LP failed: {res.message}")
    p = res.x[:ne]
    n = res.x[ne:]
    cycle = p - n
    lam = res.eqlin.marginals
    # marginals are the standard equality duals: value = rhs . lam
    w = A.T @ lam
    dual_value = float(rhs @ lam)
    return StableNormValue(alpha, float(res.fun), cycle, w, dual_value)


def _dual_separation_bounds(X: SimplicialComplex, g: PLMetric):
    """c_i > 0 with ||alpha|| >= |alpha_i| * c_i for every class alpha.

    For each basis direction, maximize <w, h_i> over closed cochains w
    with |w_e| <= l_e and <w, h_j> = 0 for j != i.
    """
    edges = X.edges
    ne = len(edges)
    lengths = np.array([g.length(u, v) for (u, v) in edges])
    cycles, _, _ = _class_system(X)
    b = len(cycles)
    d2 = np.array(X.boundary_matrix(2), dtype=float)  # E x F
    H = np.array(cycles, dtype=float)  # b x E
    out = []
    for i in range(b):
        # variables: w (ne), z (1); maximize z
        c_obj = np.zeros(ne + 1)
        c_obj[-1] = -1.0
        A_eq = []
        b_eq = []
        for f in range(d2.shape[1]):
            row = np.zeros(ne + 1)
            row[:ne] = d2[:, f]
            A_eq.append(row)
            b_eq.append(0.0)
        for j in range(b):
            row = np.zeros(ne + 1)
            row[:ne] = H[j]
            row[-1] = -1.0 if j == i else 0.0
            A_eq.append(row)
            b_eq.append(0.0)
        bounds = [(-l, l) for l in lengths] + [(None, None)]
        res = linprog(c_obj, A_eq=np.array(A_eq), b_eq=np.array(b_eq),
                      bounds=bounds, method="highs")
        if res.status != 0:
            raise ComplexError(f"separation LP failed: {res.message}")
        out.append(float(res.x[-1]))
    return out


def stsys1(X: SimplicialComplex, g: PLMetric) -> SystoleValue:
    """Minimum stable norm over nonzero free integral H_1 classes.

    The enumeration radius is certified by dual separation bounds: a class
    with |alpha_i| > value / c_i has stable norm above the incumbent.
    """
    cycles, _, _ = _class_system(X)
    b = len(cycles)
    if b == 0:
        return SystoleValue(INF, None, "exact", "b_1 = 0: no infinite-order classes")
    basis_vals = []
    for i in range(b):
        e = tuple(1 if j == i else 0 for j in range(b))
        basis_vals.append(stable_norm(X, g, e))
    best = min(basis_vals, key=lambda s: s.value)
    bound = best.value
    cs = _dual_separation_bounds(X, g)
    if any(c <= 0 for c in cs):
        raise ComplexError("degenerate separation bound; cannot certify search")
    box = [int(math.floor(bound / c + 1e-9)) for c in cs]
    best_alpha = best.class_coords
    best_sn = best
    for alpha in itertools.product(*[range(-m, m + 1) for m in box]):
        if not any(alpha):
            continue
        # dedupe +/- and skip basis vectors already done
        first = next(a for a in alpha if a)
        if first < 0:
            continue
        sn = stable_norm(X, g, alpha)
        if sn.value < best_sn.value - 1e-12:
            best_sn = sn
            best_alpha = alpha
    return SystoleValue(
        best_sn.value,
        [("class", best_alpha), ("cycle", best_sn.cycle)],
        "exact",
        f"mass LP over certified box {box}",
    )


def sys1_aggregate(
    X: SimplicialComplex,
    g: PLMetric,
    covers: list[CoverSpec] | None = None,
    complete: bool = False,
) -> SystoleValue:
    """min(pisys1 surrogate, stsys1); exactness is the weaker of the two."""
    p = pisys1_upper(X, g, covers, complete=complete)
    s = stsys1(X, g)
    if p.value <= s.value:
        return SystoleValue(p.value, p.witness, p.exactness,
                            f"homotopy branch: {p.provenance}")
    return SystoleValue(s.value, s.witness, s.exactness,
                        f"stable branch: {s.provenance}")


def sysk_aggregate(
    X: SimplicialComplex,
    g: PLMetric,
    k: int,
    covers: list[CoverSpec] | None = None,
    **kwargs,
) -> SystoleValue:
    """Aggregated k-systole over the listed covers (k = 1 or n-1).

    Any finite list of covers truncates the defining infimum, so for
    k = n-1 the result is flagged as an upper bound of that infimum.
    """
    n = X.dim
    if k == 1:
        return sys1_aggregate(X, g, covers)
    if k != n - 1:
        raise ComplexError(f"unsupported degree k={k}; only 1 and n-1")
    from .hypersurface import sys_codim1_z2

    from .simplicial import build_cover

    results = [sys_codim1_z2(X, g, **kwargs)]
    for spec in covers or []:
        cov, gcov, _ = build_cover(X, g, spec)
        results.append(sys_codim1_z2(cov, gcov, **kwargs))
    best = min(results, key=lambda s: s.value)
    exact = "upper-bound" if (covers or best.exactness != "exact") else best.exactness
    return SystoleValue(best.value, best.witness, exact,
                        "min over trivial + listed covers (truncated infimum)")
