"""Sparse rank-one models, the difference map and dimension counts."""
from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np

from .config import SUPPORT_BUDGET
from .errors import DimensionError, PreconditionError
from .numerics import as_vector, complex_normal, rng


@dataclass(frozen=True)
class SupportPattern:
    """Index set in ``{1, ..., n}`` (1-based, strictly increasing)."""

    n: int
    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise PreconditionError(f"indices must be strictly increasing: {idx}")
        if idx and (idx[0] < 1 or idx[-1] > self.n):
            raise PreconditionError(f"indices {idx} outside 1..{self.n}")
        object.__setattr__(self, "indices", idx)

    @property
    def size(self):
        return len(self.indices)

    @property
    def zero_based(self):
        return np.asarray(self.indices, dtype=np.int64) - 1

    def __contains__(self, i):
        return i in self.indices

    def place(self, x):
        """``P_A`` applied to the coefficients: spread ``x`` onto the support."""
        x = as_vector(x)
        if x.shape[0] != self.size:
            raise DimensionError(f"{x.shape[0]} coefficients for a support of size {self.size}")
        out = np.zeros(self.n, dtype=np.complex128)
        out[self.zero_based] = x
        return out

    def extract(self, x):
        return as_vector(x)[self.zero_based]

    @classmethod
    def of(cls, x, tol=0.0):
        x = as_vector(x)
        return cls(x.shape[0], tuple(int(i) + 1 for i in np.flatnonzero(np.abs(x) > tol)))


@dataclass(frozen=True, eq=False)
class SparseRankOnePoint:
    A: SupportPattern
    B: SupportPattern
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = as_vector(self.u)
        v = as_vector(self.v)
        if u.shape[0] != self.A.size or v.shape[0] != self.B.size:
            raise DimensionError("coefficient lengths must match support sizes")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def shape(self):
        return (self.A.n, self.B.n)

    def full_factors(self):
        return self.A.place(self.u), self.B.place(self.v)


@dataclass(frozen=True, eq=False)
class DifferencePoint:
    X: SparseRankOnePoint
    Y: SparseRankOnePoint


def enumerate_supports(n, s):
    if not 1 <= s <= n:
        raise PreconditionError(f"need 1 <= s <= n, got s={s}, n={n}")
    return [SupportPattern(n, c) for c in combinations(range(1, n + 1), s)]


def embed(p):
    X = np.zeros(p.shape, dtype=np.complex128)
    X[np.ix_(p.A.zero_based, p.B.zero_based)] = np.outer(p.u, p.v)
    return X


def extract(X, A, B):
    """Inverse of ``embed`` on ``W_{A,B}`` with the first entry of ``u`` set to one.

    Requires the first row of the block to be nonzero.
    """
    block = np.asarray(X, dtype=np.complex128)[np.ix_(A.zero_based, B.zero_based)]
    v = block[0].copy()
    if not np.any(v):
        raise PreconditionError("first row of the block vanishes")
    j = int(np.argmax(np.abs(v)))
    u = block[:, j] / v[j]
    u[0] = 1.0  # exact, not just up to rounding
    return SparseRankOnePoint(A, B, u, v)


def psi(d):
    if d.X.shape != d.Y.shape:
        raise DimensionError(f"ambient shapes differ: {d.X.shape} vs {d.Y.shape}")
    return embed(d.X) - embed(d.Y)


def _check_sparsities(n1, n2, s1, s2):
    if n1 < 2 or n2 < 2:
        raise PreconditionError("n1, n2 must be at least 2")
    if not (1 <= s1 <= n1 and 1 <= s2 <= n2):
        raise PreconditionError(f"sparsities ({s1}, {s2}) out of range for ({n1}, {n2})")


def expected_dimension(n1, n2, s1, s2):
    """Complex dimension of the difference set of sparse rank-one matrices."""
    _check_sparsities(n1, n2, s1, s2)
    if s1 == n1 and s2 == n2:
        return 2 * (n1 + n2 - 2)
    return 2 * (s1 + s2 - 1)


def injectivity_threshold(n1, n2, s1, s2):
    """Fewest measurements allowing a stably (s1, s2)-injective map."""
    _check_sparsities(n1, n2, s1, s2)
    if s1 == n1 and s2 == n2:
        return 2 * (n1 + n2) - 4
    return 2 * (s1 + s2) - 2


def support_quadruples(n1, n2, s1, s2, seed=0, budget=SUPPORT_BUDGET, symmetric=False):
    """Support quadruples ``(A, B, A', B')`` to scan.

    All of them when there are at most ``budget``; otherwise ``budget`` uniform
    draws plus one quadruple with ``1 in A \\ A'`` and ``2 in A' \\ A`` (and
    the analogue for columns) when the sparsities allow it. With
    ``symmetric=True`` the swap ``(A, B) <-> (A', B')`` is factored out.
    """
    _check_sparsities(n1, n2, s1, s2)
    rows = enumerate_supports(n1, s1)
    cols = enumerate_supports(n2, s2)
    pairs = list(product(rows, cols))
    total = len(pairs) ** 2
    if total <= budget:
        out = []
        for i, p in enumerate(pairs):
            start = i if symmetric else 0
            for q in pairs[start:]:
                out.append((p[0], p[1], q[0], q[1]))
        return out

    g = rng(seed, 7)
    out = [_spread_quadruple(n1, n2, s1, s2)]
    for _ in range(budget - 1):
        i, j = g.integers(len(pairs), size=2)
        out.append((pairs[i][0], pairs[i][1], pairs[j][0], pairs[j][1]))
    return out


def _spread_quadruple(n1, n2, s1, s2):
    def split(n, s):
        if s < n:
            # 1 in A only, 2 in A' only, the rest shared from the top
            rest = list(range(n, 2, -1))[: s - 1]
            return tuple(sorted([1] + rest)), tuple(sorted([2] + rest))
        full = tuple(range(1, n + 1))
        return full, full

    A, A2 = split(n1, s1)
    B, B2 = split(n2, s2)
    return (SupportPattern(n1, A), SupportPattern(n2, B), SupportPattern(n1, A2), SupportPattern(n2, B2))


def difference_jacobian(n1, n2, A, B, A2, B2, u, v, u2, v2):
    """Jacobian of ``(u, v, u', v') -> embed(A,B,u,v) - embed(A',B',u',v')``.

    Shape ``(n1 n2, 2 (s1 + s2))``; the map is bilinear in the parameters so
    each column is an exact embedded unit perturbation.
    """
    s1, s2 = A.size, B.size
    J = np.zeros((n1, n2, 2 * (s1 + s2)), dtype=np.complex128)
    vt = B.place(v)
    ut = A.place(u)
    v2t = B2.place(v2)
    u2t = A2.place(u2)
    col = 0
    for a in A.zero_based:
        J[a, :, col] = vt
        col += 1
    for b in B.zero_based:
        J[:, b, col] = ut
        col += 1
    for a in A2.zero_based:
        J[a, :, col] = -v2t
        col += 1
    for b in B2.zero_based:
        J[:, b, col] = -u2t
        col += 1
    return J.reshape(n1 * n2, -1)


def jacobian_rank_dimension(n1, n2, s1, s2, samples=10, seed=0, rank_tol=1e-6, equal_supports_only=False):
    """Largest Jacobian rank of the difference parametrization over random points.

    For every scanned support quadruple, ``samples`` Gaussian parameter draws
    are taken; ranks count singular values above ``rank_tol * max(1, s_max)``.
    """
    if samples < 1:
        raise PreconditionError("samples must be positive")
    if equal_supports_only:
        quads = [(A, B, A, B) for A in enumerate_supports(n1, s1) for B in enumerate_supports(n2, s2)]
    else:
        quads = support_quadruples(n1, n2, s1, s2, seed=seed, symmetric=True)
    g = rng(seed, 11)
    best = 0
    for A, B, A2, B2 in quads:
        params = complex_normal(g, (samples, 2 * (s1 + s2)))
        Js = np.stack([
            difference_jacobian(n1, n2, A, B, A2, B2, p[:s1], p[s1:s1 + s2], p[s1 + s2:2 * s1 + s2], p[2 * s1 + s2:])
            for p in params
        ])
        sv = np.linalg.svd(Js, compute_uv=False)
        thresh = rank_tol * np.maximum(1.0, sv[:, :1])
        best = max(best, int((sv > thresh).sum(axis=1).max()))
    return best


def count_support_pairs(n1, n2, s1, s2):
    return comb(n1, s1) * comb(n2, s2)
