"""Exhaustive-support blind recovery, used to observe identifiability.

The scaling ``lambda`` in ``(lambda u, v / lambda)`` is never recoverable, so
results are only ever compared through :func:`orbit_distance`.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .certify import _block, orbit_distance, random_sparse_pair
from .config import DEFAULT_TOLERANCES, SUPPORT_BUDGET
from .errors import PreconditionError
from .models import SparseRankOnePoint, count_support_pairs, enumerate_supports
from .numerics import as_vector, complex_normal, rng


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    best: SparseRankOnePoint
    residual: float
    runner_up_residual: float
    ambiguity_gap: float

    def factors(self):
        return self.best.full_factors()


def _spectral_start(T, z):
    m, s1, s2 = T.shape
    x, *_ = np.linalg.lstsq(T.reshape(m, s1 * s2), z, rcond=None)
    U, s, Vh = np.linalg.svd(x.reshape(s1, s2))
    r = np.sqrt(s[0])
    if r == 0:
        return np.ones(s1, dtype=np.complex128), np.ones(s2, dtype=np.complex128)
    return U[:, 0] * r, Vh[0] * r


def blind_recover(M, z, s1, s2, restarts=5, seed=0, max_sweeps=200, tol=1e-12,
                  orbit_radius=DEFAULT_TOLERANCES.orbit_radius):
    """Best sparse rank-one fit to ``z`` over all support pairs.

    Each support pair is fitted by lifted least squares, rank-one truncation
    and alternating least squares. The winning support is then re-fitted from
    ``restarts`` random starts so that distinct local minima there also
    compete for runner-up. The runner-up is the best candidate farther than
    ``orbit_radius`` from the winner.
    """
    z = as_vector(z)
    if z.shape[0] != M.m:
        raise PreconditionError(f"z has length {z.shape[0]}, map has {M.m} rows")
    if not np.any(z):
        raise PreconditionError("z = 0 is outside the identifiable set")
    if not (1 <= s1 <= M.n1 and 1 <= s2 <= M.n2):
        raise PreconditionError("sparsities out of range")
    if count_support_pairs(M.n1, M.n2, s1, s2) > SUPPORT_BUDGET:
        raise PreconditionError("too many support pairs for exhaustive search")

    cands = []  # (residual, A, B, u, v) in enumeration order
    for A in enumerate_supports(M.n1, s1):
        for B in enumerate_supports(M.n2, s2):
            T = _block(M, A, B)
            u0, v0 = _spectral_start(T, z)
            u, v, res, _ = _kernels.als_rank_one(T, z, u0, v0, max_sweeps, tol)
            cands.append((res, A, B, u, v))
    # stable sort: ties resolved by lexicographic support order
    order = sorted(range(len(cands)), key=lambda i: cands[i][0])
    _, A, B, _, _ = cands[order[0]]
    T = _block(M, A, B)
    g = rng(seed, 13)
    for _ in range(restarts):
        u0, v0 = complex_normal(g, (A.size,)), complex_normal(g, (B.size,))
        u, v, res, _ = _kernels.als_rank_one(T, z, u0, v0, max_sweeps, tol)
        cands.append((res, A, B, u, v))

    def full(c):
        return c[1].place(c[3]), c[2].place(c[4])

    cands = [c for c in cands if np.any(c[3]) and np.any(c[4])]
    cands.sort(key=lambda c: c[0])
    best = cands[0]
    bu, bv = full(best)
    runner = np.inf
    for c in cands[1:]:
        if c[0] >= runner:
            break
        cu, cv = full(c)
        if orbit_distance(bu, bv, cu, cv) > orbit_radius:
            runner = c[0]
            break
    point = SparseRankOnePoint(best[1], best[2], best[3], best[4])
    return RecoveryResult(point, float(best[0]), float(runner), float(runner - best[0]))


def recovery_succeeded(result, u, v, tolerances=DEFAULT_TOLERANCES):
    bu, bv = result.factors()
    return (orbit_distance(bu, bv, u, v) <= tolerances.recovery_tol
            and result.ambiguity_gap > tolerances.recovery_tol)


def empirical_strong_identifiability(M, s1, s2, trials, seed, restarts=5, tolerances=DEFAULT_TOLERANCES):
    """Fraction of random sparse pairs recovered up to scaling with a clear margin."""
    if trials < 1:
        raise PreconditionError("trials must be positive")
    hits = 0
    for t in range(trials):
        g = rng(seed, 17, t)
        u, v = random_sparse_pair(M.n1, M.n2, s1, s2, g)
        res = blind_recover(M, M(u, v), s1, s2, restarts=restarts, seed=int(g.integers(2**63)))
        hits += recovery_succeeded(res, u, v, tolerances)
    return hits / trials
