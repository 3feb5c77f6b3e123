"""Circular convolution, its Fourier diagonalization and deconvolution maps.

Indices at the API boundary follow the 1-based convention
``(v * w)_i = sum_j v_j w_{[(i - j - 1) mod m] + 1}``; internally arrays are
0-based as usual.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DimensionError, PreconditionError
from .lifting import StructuredRows, from_structured
from .numerics import as_matrix, as_vector, complex_normal, dft_matrix, numeric_rank, rng


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    columns: np.ndarray  # (m, k), full column rank

    def __post_init__(self):
        C = as_matrix(self.columns)
        if C.shape[1] > C.shape[0] or numeric_rank(C) != C.shape[1]:
            raise PreconditionError(f"basis of shape {C.shape} is not of full column rank")
        object.__setattr__(self, "columns", C)

    @property
    def ambient(self):
        return self.columns.shape[0]

    @property
    def dim(self):
        return self.columns.shape[1]

    def projection(self):
        Q, _ = np.linalg.qr(self.columns)
        return Q @ Q.conj().T


def _pair(v, w):
    v = as_vector(v)
    w = as_vector(w)
    if v.shape != w.shape:
        raise DimensionError(f"lengths differ: {v.shape[0]} vs {w.shape[0]}")
    return v, w


def circ_conv(v, w):
    """Direct O(m^2) evaluation of the circular convolution sum."""
    v, w = _pair(v, w)
    return _kernels.circ_conv_direct(v, w)


def circ_conv_fft(v, w):
    """Convolution through the Fourier matrix: ``sqrt(m) F^* ((F v) . (F w))``."""
    v, w = _pair(v, w)
    m = v.shape[0]
    F = dft_matrix(m)
    return np.sqrt(m) * (F.conj().T @ ((F @ v) * (F @ w)))


def deconv_rows(E, D):
    E = E.columns if isinstance(E, SubspaceBasis) else as_matrix(E)
    D = D.columns if isinstance(D, SubspaceBasis) else as_matrix(D)
    if E.shape[0] != D.shape[0]:
        raise DimensionError(f"ambient dimensions differ: {E.shape[0]} vs {D.shape[0]}")
    F = dft_matrix(E.shape[0])
    return StructuredRows(F @ E, F @ D)


def deconv_map(E, D):
    """Lifted map on ``M(k, l)`` with ``B(u, v) = (F E u) . (F D v)``.

    ``sqrt(m) F^* B(u, v)`` equals ``circ_conv(E u, D v)``; see
    :func:`fourier_to_signal`.
    """
    return from_structured(deconv_rows(E, D))


def fourier_to_signal(y):
    """Map Hadamard-domain measurements back to the convolution ``E u * D v``."""
    y = as_vector(y)
    m = y.shape[0]
    return np.sqrt(m) * (dft_matrix(m).conj().T @ y)


@dataclass(frozen=True)
class StandardConvEmbedding:
    """Linear convolution of length-n vectors as circular convolution in C^(2n-1).

    ``pad`` appends zeros; the circular result is the linear one shifted by
    one place, which ``restrict`` undoes.
    """

    n: int

    @property
    def length(self):
        return 2 * self.n - 1

    def pad(self, x):
        x = as_vector(x)
        if x.shape[0] != self.n:
            raise DimensionError(f"expected length {self.n}, got {x.shape[0]}")
        out = np.zeros(self.length, dtype=np.complex128)
        out[: self.n] = x
        return out

    def restrict(self, y):
        return np.roll(as_vector(y), -1)

    def convolve(self, u, v):
        return self.restrict(circ_conv(self.pad(u), self.pad(v)))


def standard_conv_embedding(n):
    if n < 1:
        raise PreconditionError("n must be positive")
    return StandardConvEmbedding(n)


def standard_conv(u, v):
    """Reference double sum ``sum_j u_j v_{i-(j-1)}``, i = 1..2n-1."""
    u, v = _pair(u, v)
    n = u.shape[0]
    out = np.zeros(2 * n - 1, dtype=np.complex128)
    for i in range(1, 2 * n):
        for j in range(1, n + 1):
            k = i - (j - 1)
            if 1 <= k <= n:
                out[i - 1] += u[j - 1] * v[k - 1]
    return out


def haar_subspace(m, k, seed):
    """Orthonormal basis of a uniformly distributed k-dimensional subspace of C^m.

    QR of a complex Gaussian matrix, with columns rephased so that ``R`` has a
    positive diagonal.
    """
    if not 1 <= k <= m:
        raise PreconditionError(f"need 1 <= k <= m, got k={k}, m={m}")
    Q, R = np.linalg.qr(complex_normal(rng(seed), (m, k)))
    d = np.diag(R)
    Q = Q * (d / np.abs(d))[None, :]
    return SubspaceBasis(Q)


def gaussian_basis(m, k, seed):
    return SubspaceBasis(complex_normal(rng(seed), (m, k)))
