"""Euclidean lattices: shortest vectors, duals, and dual-critical search.

Shortest vectors are certified: the basis is LLL-reduced and a
Fincke-Pohst enumeration is run with radius equal to the shortest
reduced basis vector, so the returned minimum is exact, not heuristic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LatticeBasis",
    "LatticeError",
    "dual_lattice",
    "lambda1",
    "shortest_vector",
    "lambda1_gram",
    "berge_martinet_product",
    "hermite_invariant",
    "dual_critical_search",
    "GAMMA_PRIME",
    "read_lattice",
    "format_lattice",
]


class LatticeError(ValueError):
    pass


# Known Berge-Martinet constants, ranks 1..4.
GAMMA_PRIME = {
    1: 1.0,
    2: 2.0 / math.sqrt(3.0),
    3: math.sqrt(1.5),
    4: math.sqrt(2.0),
}


@dataclass(frozen=True)
class LatticeBasis:
    """Full-rank lattice in R^b given by b basis row vectors."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.basis, dtype=float))
        object.__setattr__(self, "basis", B)
        if B.shape[0] != B.shape[1]:
            raise LatticeError("basis must be square (full-rank lattice)")
        scale = max(np.abs(B).max(), 1e-300)
        if abs(np.linalg.det(B)) <= 1e-12 * scale ** B.shape[0]:
            raise LatticeError("basis is singular or nearly singular")

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def gram(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def det(self) -> float:
        return abs(np.linalg.det(self.basis))

    def scaled(self, c: float) -> "LatticeBasis":
        return LatticeBasis(c * self.basis)


def dual_lattice(L: LatticeBasis) -> LatticeBasis:
    """Dual basis D with D @ B.T = I (vectors pairing integrally with L)."""
    try:
        D = np.linalg.inv(L.basis).T
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by ctor
        raise LatticeError("cannot invert basis") from exc
    return LatticeBasis(D)


# ---------------------------------------------------------------------------
# Reduction and enumeration


def lll_reduce(B: np.ndarray, delta: float = 0.99) -> np.ndarray:
    """LLL reduction of the rows of B (floating point, delta-Lovasz)."""
    B = np.array(B, dtype=float)
    n = B.shape[0]

    def gso(B):
        Bs = np.zeros_like(B)
        mu = np.zeros((n, n))
        for i in range(n):
            Bs[i] = B[i]
            for j in range(i):
                mu[i, j] = B[i] @ Bs[j] / (Bs[j] @ Bs[j])
                Bs[i] -= mu[i, j] * Bs[j]
        return Bs, mu

    Bs, mu = gso(B)
    k = 1
    iters = 0
    while k < n:
        iters += 1
        if iters > 10000 * n * n:  # defensive: floating point stall
            break
        for j in range(k - 1, -1, -1):
            q = round(mu[k, j])
            if q:
                B[k] -= q * B[j]
                Bs, mu = gso(B)
        if Bs[k] @ Bs[k] >= (delta - mu[k, k - 1] ** 2) * (Bs[k - 1] @ Bs[k - 1]):
            k += 1
        else:
            B[[k, k - 1]] = B[[k - 1, k]]
            Bs, mu = gso(B)
            k = max(k - 1, 1)
    return B


def _enumerate_min_sq(G: np.ndarray, r2: float) -> tuple[float, np.ndarray]:
    """Exact minimum of x^T G x over nonzero integer x with x^T G x <= r2.

    Fincke-Pohst style depth-first enumeration on the Cholesky factor.
    The radius r2 must be attainable (some nonzero x achieves <= r2);
    returns (minimum, argmin coefficients).
    """
    n = G.shape[0]
    R = np.linalg.cholesky(G).T  # upper triangular, G = R^T R
    best = r2
    best_x = None
    x = np.zeros(n, dtype=int)

    def dfs(k, partial):  # partial = squared contribution of levels > k
        nonlocal best, best_x
        if partial >= best - 1e-14 and best_x is not None:
            return
        s = sum(R[k, j] * x[j] for j in range(k + 1, n))
        c = -s / R[k, k]
        radius = math.sqrt(max(best - partial, 0.0)) / abs(R[k, k])
        lo = math.ceil(c - radius - 1e-12)
        hi = math.floor(c + radius + 1e-12)
        for v in range(lo, hi + 1):
            x[k] = v
            contrib = (R[k, k] * (v - c)) ** 2
            if k == 0:
                if any(x):
                    tot = partial + contrib
                    if tot < best or best_x is None and tot <= best:
                        best = tot
                        best_x = x.copy()
            else:
                dfs(k - 1, partial + contrib)
        x[k] = 0

    dfs(n - 1, 0.0)
    return best, best_x


def shortest_vector(L: LatticeBasis) -> tuple[np.ndarray, float]:
    """A shortest nonzero lattice vector and its length (certified)."""
    B = lll_reduce(L.basis)
    r2 = float(np.min(np.einsum("ij,ij->i", B, B)))
    G = B @ B.T
    best, x = _enumerate_min_sq(G, r2 * (1 + 1e-12))
    return np.asarray(x, dtype=float) @ B, math.sqrt(best)


def lambda1(L: LatticeBasis) -> float:
    """Least length of a nonzero vector of L (exact search)."""
    B = lll_reduce(L.basis)
    r2 = float(np.min(np.einsum("ij,ij->i", B, B)))
    G = B @ B.T
    return math.sqrt(_enumerate_min_sq(G, r2 * (1 + 1e-12))[0])


def lambda1_gram(G: np.ndarray) -> float:
    """lambda1 of the lattice with Gram matrix G (symmetric positive definite)."""
    G = np.asarray(G, dtype=float)
    R = np.linalg.cholesky(G)
    return lambda1(LatticeBasis(R))


def lambda1_gram_vector(G: np.ndarray) -> tuple[float, np.ndarray]:
    """(lambda1, integer coefficients) of a shortest vector for Gram G."""
    G = np.asarray(G, dtype=float)
    R = np.linalg.cholesky(G)
    v, length = shortest_vector(LatticeBasis(R))
    y = np.linalg.solve(R.T, v)
    yi = np.round(y).astype(int)
    if np.abs(y - yi).max() > 1e-6:
        raise LatticeError("shortest vector is not integral in the Gram basis")
    return length, yi


def berge_martinet_product(L: LatticeBasis) -> float:
    """lambda1(L) * lambda1(L*); scale invariant."""
    return lambda1(L) * lambda1(dual_lattice(L))


def hermite_invariant(L: LatticeBasis) -> float:
    """lambda1(L)^2 / det(L)^(2/b); scale invariant."""
    b = L.rank
    return lambda1(L) ** 2 / L.det() ** (2.0 / b)


# ---------------------------------------------------------------------------
# Dual-critical search


def _coeff_shell(b: int, box: int) -> np.ndarray:
    """Nonzero integer coefficient vectors in [-box, box]^b, one per +/- pair."""
    pts = []
    for c in itertools.product(range(-box, box + 1), repeat=b):
        if not any(c):
            continue
        # keep one representative of {c, -c}
        for v in c:
            if v > 0:
                pts.append(c)
                break
            if v < 0:
                break
    return np.array(pts, dtype=float)


def _fast_min_sq(G: np.ndarray, shell: np.ndarray) -> float:
    """min x^T G x over the precomputed coefficient shell (vectorized)."""
    return float(np.min(np.einsum("ij,jk,ik->i", shell, G, shell)))


def dual_critical_search(
    b: int, budget: int, seed: int
) -> tuple[LatticeBasis, float]:
    """Local search maximizing lambda1(L) * lambda1(L*) over det-1 lattices.

    Random symmetric perturbations of the Cholesky factor, accepted when
    they improve the product, with a restart schedule derived from the
    seed.  Deterministic given (b, budget, seed).  The returned value is
    recomputed with the certified enumeration.
    """
    if not 1 <= b <= 8:
        raise LatticeError("rank must be between 1 and 8")
    if b == 1:
        return LatticeBasis(np.array([[1.0]])), 1.0

    rng = np.random.default_rng(seed)
    shell = _coeff_shell(b, 2)

    def product_fast(B):
        # B must be LLL-reduced; the shell then contains a shortest vector
        G = B @ B.T
        try:
            Gi = np.linalg.inv(G)
        except np.linalg.LinAlgError:
            return -1.0
        a = _fast_min_sq(G, shell)
        d = _fast_min_sq(Gi, shell)
        if a <= 0.0 or d <= 0.0:  # ill-conditioned iterate
            return -1.0
        return math.sqrt(a * d)

    def normalize(B):
        d = abs(np.linalg.det(B))
        if d < 1e-12:
            return None
        return B / d ** (1.0 / b)

    n_restarts = max(1, budget // 25000)
    per = budget // n_restarts
    best_B = np.eye(b)
    best_val = -1.0
    for _ in range(n_restarts):
        B = normalize(lll_reduce(np.eye(b) + 0.1 * rng.standard_normal((b, b))))
        if B is None:
            B = np.eye(b)
        val = product_fast(B)
        step = 0.2
        since_accept = 0
        for _ in range(per):
            cand = normalize(lll_reduce(B + step * rng.standard_normal((b, b))))
            if cand is None:
                continue
            v = product_fast(cand)
            if v > val:
                B, val = cand, v
                since_accept = 0
            else:
                since_accept += 1
                if since_accept > 200:
                    step = max(step * 0.5, 1e-4)
                    since_accept = 0
        if val > best_val:
            best_val = val
            best_B = B
    L = LatticeBasis(best_B)
    return L, berge_martinet_product(L)


# ---------------------------------------------------------------------------
# IO


def read_lattice(text: str) -> LatticeBasis:
    """Parse the plain-text lattice format: 'lattice b' then b rows."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("lattice"):
        raise LatticeError("expected header 'lattice b'")
    try:
        b = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise LatticeError("malformed lattice header") from exc
    if len(lines) < 1 + b:
        raise LatticeError("missing basis rows")
    rows = []
    for ln in lines[1 : 1 + b]:
        row = [float(tok) for tok in ln.split()]
        if len(row) != b:
            raise LatticeError("basis row has wrong length")
        rows.append(row)
    return LatticeBasis(np.array(rows))


def format_lattice(L: LatticeBasis) -> str:
    out = [f"lattice {L.rank}"]
    for row in L.basis:
        out.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(out) + "\n"
