"""Searching for (near-)collisions of sparse rank-one matrices under a map.

Everything here is a heuristic refuter/certifier: a small value with its
witness is a proof of (near) non-injectivity, a large value is only evidence.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels
from .config import DEFAULT_TOLERANCES
from .errors import DegenerateInputError, PreconditionError
from .lifting import apply_linear
from .models import SparseRankOnePoint, SupportPattern, embed, enumerate_supports, support_quadruples
from .numerics import as_vector, complex_normal, kernel_basis, rng


class Verdict(str, Enum):
    LIKELY_INJECTIVE = "LIKELY_INJECTIVE"
    COUNTEREXAMPLE_FOUND = "COUNTEREXAMPLE_FOUND"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True, eq=False)
class CertificationResult:
    estimated_constant: float
    witness: np.ndarray
    restarts_used: int
    verdict: Verdict
    # (A, B, A', B', u, v, u', v') realizing the witness as a difference
    factors: Optional[tuple] = field(default=None, repr=False)
    witness_orbit_distance: Optional[float] = None


def classify(value, tolerances=DEFAULT_TOLERANCES):
    if value < tolerances.fail_tol:
        return Verdict.COUNTEREXAMPLE_FOUND
    if value > tolerances.pass_tol:
        return Verdict.LIKELY_INJECTIVE
    return Verdict.INCONCLUSIVE


def orbit_distance(u, v, u2, v2):
    """Frobenius distance between the normalized outer products."""
    u, v, u2, v2 = (as_vector(x) for x in (u, v, u2, v2))
    if not (np.any(u) and np.any(v) and np.any(u2) and np.any(v2)):
        raise PreconditionError("orbit_distance needs nonzero vectors")
    X = np.outer(u, v)
    Y = np.outer(u2, v2)
    return float(np.linalg.norm(X / np.linalg.norm(X) - Y / np.linalg.norm(Y)))


def _block(M, A, B):
    return np.ascontiguousarray(M.tensor[np.ix_(np.arange(M.m), A.zero_based, B.zero_based)])


def _difference(n1, n2, A, B, A2, B2, u, v, u2, v2):
    return embed(SparseRankOnePoint(A, B, u, v)) - embed(SparseRankOnePoint(A2, B2, u2, v2))


def estimate_stability_constant(M, s1, s2, restarts=2, max_iters=150, seed=0,
                                tolerances=DEFAULT_TOLERANCES, start=None, quadruples=None, rel_tol=1e-6):
    """Smallest ``||M(X)||`` found over unit-norm differences of sparse rank-one matrices.

    Every support quadruple is attacked from ``restarts`` Gaussian starts by
    block least squares (u, v, u', v') with the difference rescaled to unit
    Frobenius norm after each sweep. ``start`` may be the ``factors`` of an
    earlier result; it is evaluated as-is and then refined.
    """
    if restarts < 1:
        raise PreconditionError("restarts must be positive")
    n1, n2 = M.n1, M.n2
    if quadruples is None:
        quadruples = support_quadruples(n1, n2, s1, s2, seed=seed, symmetric=True)
    best_val = np.inf
    best = None
    tasks = []
    if start is not None:
        A, B, A2, B2, u, v, u2, v2 = start
        X = _difference(n1, n2, A, B, A2, B2, u, v, u2, v2)
        nrm = np.linalg.norm(X)
        if nrm > 0:
            s = 1 / np.sqrt(nrm)
            best = (A, B, A2, B2, u * s, v * s, u2 * s, v2 * s)
            best_val = np.linalg.norm(apply_linear(M, X / nrm))
        tasks.append((A, B, A2, B2, u, v, u2, v2))
    for q, (A, B, A2, B2) in enumerate(quadruples):
        g = rng(seed, 3, q)
        for _ in range(restarts):
            tasks.append((A, B, A2, B2, complex_normal(g, (A.size,)), complex_normal(g, (B.size,)),
                          complex_normal(g, (A2.size,)), complex_normal(g, (B2.size,))))
    blocks = {}
    for A, B, A2, B2, u, v, u2, v2 in tasks:
        for key in ((A, B), (A2, B2)):
            if key not in blocks:
                blocks[key] = _block(M, *key)
        u, v, u2, v2, val = _kernels.stability_descent(
            blocks[A, B], blocks[A2, B2], n1, n2, A.zero_based, B.zero_based, A2.zero_based, B2.zero_based,
            u, v, u2, v2, max_iters, rel_tol)
        if np.isfinite(val) and val < best_val:
            best_val = val
            best = (A, B, A2, B2, u, v, u2, v2)
    if best is None:
        return CertificationResult(np.inf, np.zeros((n1, n2), dtype=np.complex128), restarts, Verdict.INCONCLUSIVE)
    X = _difference(n1, n2, *best)
    witness = X / np.linalg.norm(X)
    value = float(np.linalg.norm(apply_linear(M, witness)))
    return CertificationResult(value, witness, restarts, classify(value, tolerances), factors=best)


def find_rank2_in_kernel(M, max_iters=2000, restarts=20, seed=0, rank=2, sigma_tol=1e-6, residual_tol=1e-8):
    """Unit-norm matrix of rank <= 2 in ``ker M`` by alternating projections, or None.

    Starts are random kernel elements; each run alternates between the kernel
    and the rank-``rank`` truncation until the trailing singular mass drops
    below ``sigma_tol / 10``.
    """
    K = kernel_basis(M.coefficient_matrix, 1e-10)
    n1, n2 = M.n1, M.n2
    if K.shape[1] == 0:
        return None
    K = np.ascontiguousarray(K)
    g = rng(seed, 5)
    for _ in range(restarts):
        X0 = (K @ complex_normal(g, (K.shape[1],))).reshape(n1, n2)
        X, tail = _kernels.rank2_alternating_projections(K, X0, rank, max_iters, sigma_tol * 1e-1)
        X = X / np.linalg.norm(X)
        s = np.linalg.svd(X, compute_uv=False)
        res = np.linalg.norm(apply_linear(M, X))
        if (s[rank:] <= sigma_tol).all() and res <= residual_tol:
            return X
    return None


def invert_rank_one_difference(Z, A, A2, B):
    """Split ``Z = X - Y`` with ``X`` in ``W_{A,B}`` and ``Y`` in ``W_{A',B}``.

    Uses the rows ``p = min(A \\ A')`` and ``q = min(A' \\ A)``, where only one
    of the two summands lives, and dual vectors ``w1, w2`` in their span with
    ``<w1, X_p> = 1, <w1, Y_q> = 0`` and ``<w2, X_p> = 0, <w2, Y_q> = 1``
    (``<a, b> = sum conj(a) b``). Then ``X_i = <w1, Z_i> X_p``.
    """
    Z = np.asarray(Z, dtype=np.complex128)
    only_a = sorted(set(A.indices) - set(A2.indices))
    only_a2 = sorted(set(A2.indices) - set(A.indices))
    if not only_a or not only_a2:
        raise PreconditionError("need rows in A \\ A' and in A' \\ A")
    p, q = only_a[0] - 1, only_a2[0] - 1
    xp = Z[p].copy()
    yq = -Z[q]
    G = np.array([[np.vdot(xp, xp), np.vdot(xp, yq)], [np.vdot(yq, xp), np.vdot(yq, yq)]])
    scale = G[0, 0].real * G[1, 1].real
    det = (G[0, 0] * G[1, 1] - G[0, 1] * G[1, 0]).real
    if scale == 0.0 or det < 1e-10 * scale:
        raise DegenerateInputError("rows X_p and Y_q are zero or linearly dependent")
    # w = c1 xp + c2 yq; <w, xp>, <w, yq> are conj(c) @ G columns
    c = np.linalg.solve(G.T.conj(), np.eye(2))
    basis = np.stack([xp, yq], axis=1)
    w1 = basis @ c[:, 0]
    X = np.outer(Z @ w1.conj(), xp)
    cols = np.zeros(Z.shape[1], dtype=bool)
    cols[B.zero_based] = True
    X[:, ~cols] = 0
    return X, X - Z


def _weak_candidates(M, A, B, z, restarts, g, max_sweeps):
    T = _block(M, A, B)
    out = []
    G = T.reshape(M.m, -1)
    x, *_ = np.linalg.lstsq(G, z, rcond=None)
    U, s, Vh = np.linalg.svd(x.reshape(A.size, B.size))
    starts = [(U[:, 0] * np.sqrt(s[0]), Vh[0] * np.sqrt(s[0]))]
    for _ in range(restarts):
        starts.append((complex_normal(g, (A.size,)), complex_normal(g, (B.size,))))
    for u0, v0 in starts:
        u, v, res, _ = _kernels.als_rank_one(T, z, u0, v0, max_sweeps, 1e-12)
        out.append((u, v, res))
    return out


def weak_identifiability_test(M, u0, v0, s1, s2, restarts=3, seed=0, tolerances=DEFAULT_TOLERANCES,
                              max_sweeps=500, trivial_radius=1e-6):
    """Smallest ``||M(D)||`` over unit-norm ``D`` proportional to ``u0 v0^T - u v^T``.

    For each support pair, alternating least squares fits ``M(u v^T)`` to
    ``M(u0 v0^T)``; fits on the orbit of ``(u0, v0)`` (within
    ``trivial_radius``) are the trivial solution and skipped.
    """
    u0 = as_vector(u0)
    v0 = as_vector(v0)
    if not np.any(u0) or not np.any(v0):
        raise PreconditionError("signal factors must be nonzero")
    if np.count_nonzero(u0) > s1 or np.count_nonzero(v0) > s2:
        raise PreconditionError("signal factors are not (s1, s2)-sparse")
    n1, n2 = M.n1, M.n2
    X0 = np.outer(u0, v0)
    z = apply_linear(M, X0)
    g = rng(seed, 9)
    best_val = np.inf
    best = None
    for A in enumerate_supports(n1, s1):
        for B in enumerate_supports(n2, s2):
            for u, v, _ in _weak_candidates(M, A, B, z, restarts, g, max_sweeps):
                ut, vt = A.place(u), B.place(v)
                if not (np.any(ut) and np.any(vt)):
                    continue
                if orbit_distance(ut, vt, u0, v0) <= trivial_radius:
                    continue
                D = X0 - np.outer(ut, vt)
                val = np.linalg.norm(apply_linear(M, D)) / np.linalg.norm(D)
                if val < best_val:
                    best_val = val
                    best = (ut, vt, D)
    if best is None:
        return CertificationResult(np.inf, np.zeros((n1, n2), dtype=np.complex128), restarts, Verdict.INCONCLUSIVE)
    ut, vt, D = best
    witness = D / np.linalg.norm(D)
    value = float(np.linalg.norm(apply_linear(M, witness)))
    return CertificationResult(value, witness, restarts, classify(value, tolerances),
                               factors=(ut, vt), witness_orbit_distance=orbit_distance(ut, vt, u0, v0))


def random_sparse_pair(n1, n2, s1, s2, gen):
    """Random ``(u, v)`` with uniformly drawn supports of sizes ``s1``, ``s2``."""
    A = SupportPattern(n1, tuple(sorted(gen.choice(n1, s1, replace=False) + 1)))
    B = SupportPattern(n2, tuple(sorted(gen.choice(n2, s2, replace=False) + 1)))
    return A.place(complex_normal(gen, (s1,))), B.place(complex_normal(gen, (s2,)))
