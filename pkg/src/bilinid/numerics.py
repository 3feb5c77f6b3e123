"""Dense complex linear algebra and seeded sampling.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
"""
import numpy as np

from .errors import ConvergenceError, PreconditionError

_MASK64 = (1 << 64) - 1


def as_matrix(A):
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2:
        raise PreconditionError(f"expected a 2-d array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise PreconditionError("matrix has non-finite entries")
    return A


def as_vector(x):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise PreconditionError(f"expected a 1-d array, got shape {x.shape}")
    return x


def svd(A):
    """Thin SVD ``A = U diag(s) V^*`` with singular values in descending order.

    Raises ``ConvergenceError`` when LAPACK fails or the reconstruction misses
    the ``1e-12 ||A||_F`` residual bound.
    """
    A = as_matrix(A)
    if A.size == 0:
        raise PreconditionError("svd of an empty matrix")
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"svd did not converge: {exc}") from exc
    V = Vh.conj().T
    norm = np.linalg.norm(A)
    residual = np.linalg.norm((U * s) @ Vh - A)
    if residual > 1e-12 * max(norm, 1e-300) and residual > 0:
        raise ConvergenceError("svd reconstruction residual too large", residual)
    return U, s, V


def numeric_rank(A, tol=1e-8):
    """Number of singular values above ``tol * max(1, s_max)``."""
    if tol < 0:
        raise PreconditionError("tol must be nonnegative")
    A = as_matrix(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.count_nonzero(s > tol * max(1.0, s[0])))


def kernel_basis(A, tol=1e-8):
    """Orthonormal columns spanning the numerical null space of ``A``."""
    if tol < 0:
        raise PreconditionError("tol must be nonnegative")
    A = as_matrix(A)
    rows, cols = A.shape
    if rows == 0:
        return np.eye(cols, dtype=np.complex128)
    try:
        _, s, Vh = np.linalg.svd(A, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"svd did not converge: {exc}") from exc
    smax = s[0] if s.size else 0.0
    r = int(np.count_nonzero(s > tol * max(1.0, smax)))
    return Vh[r:].conj().T.copy()


def dft_matrix(m):
    """Unitary Fourier matrix with entries ``exp(2 pi i k l / m) / sqrt(m)``, k, l = 1..m."""
    if m < 1:
        raise PreconditionError("m must be positive")
    k = np.arange(1, m + 1)
    # reduce k*l mod m before exponentiating to keep phases exact
    phase = np.outer(k, k) % m
    return np.exp(2j * np.pi * phase / m) / np.sqrt(m)


def derive_seed(seed, *keys):
    """Deterministic 64-bit child seed of ``seed`` indexed by nonnegative ints."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(int(k) for k in keys))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def rng(seed, *keys):
    """Counter-based (Philox) generator keyed by ``seed`` and optional sub-keys."""
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(gen, shape):
    """Real and imaginary parts independent standard normals (E|z|^2 = 2)."""
    x = gen.standard_normal(tuple(shape) + (2,))
    return x[..., 0] + 1j * x[..., 1]


def gaussian_matrix(rows, cols, seed):
    if rows < 1 or cols < 1:
        raise PreconditionError("rows and cols must be positive")
    return complex_normal(rng(seed), (rows, cols))
