"""Bilinear maps as linear maps on outer products.

A map ``M: M(n1, n2) -> C^m`` is stored as the stack of ``m`` matrices
``Y_i`` of shape ``(n2, n1)`` with ``M(X)_i = tr(Y_i X)``; the bilinear map is
``B(u, v) = M(u v^T)`` (plain transpose, no conjugation).
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, PreconditionError
from .numerics import as_matrix, as_vector, complex_normal, numeric_rank, rng


@dataclass(frozen=True, eq=False)
class MeasurementMap:
    matrices: np.ndarray  # (m, n2, n1)

    def __post_init__(self):
        Y = np.asarray(self.matrices, dtype=np.complex128)
        if Y.ndim != 3 or Y.shape[0] < 1:
            raise DimensionError(f"expected a stack (m, n2, n1) with m >= 1, got {Y.shape}")
        Y = Y.copy()
        Y.flags.writeable = False
        object.__setattr__(self, "matrices", Y)

    @property
    def m(self):
        return self.matrices.shape[0]

    @property
    def n1(self):
        return self.matrices.shape[2]

    @property
    def n2(self):
        return self.matrices.shape[1]

    @cached_property
    def tensor(self):
        """Coefficients ``T[i, a, b] = (Y_i)_{ba}``, so ``M(X)_i = sum T[i] * X``."""
        T = np.ascontiguousarray(self.matrices.transpose(0, 2, 1))
        T.flags.writeable = False
        return T

    @cached_property
    def coefficient_matrix(self):
        """``m x (n1 n2)`` matrix whose row i is ``vec(Y_i^T)`` (row-major)."""
        C = self.tensor.reshape(self.m, self.n1 * self.n2)
        C.flags.writeable = False
        return C

    def apply(self, X):
        return apply_linear(self, X)

    def __call__(self, u, v):
        return apply_bilinear(self, u, v)

    def append(self, other):
        """Map measuring with the rows of ``self`` followed by those of ``other``."""
        if (other.n1, other.n2) != (self.n1, self.n2):
            raise DimensionError("cannot stack maps on different domains")
        return MeasurementMap(np.concatenate([self.matrices, other.matrices]))

    def to_dict(self):
        return {
            "n1": self.n1,
            "n2": self.n2,
            "m": self.m,
            "real": self.matrices.real.tolist(),
            "imag": self.matrices.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        Y = np.asarray(d["real"], dtype=float) + 1j * np.asarray(d["imag"], dtype=float)
        Y = Y.reshape(int(d["m"]), int(d["n2"]), int(d["n1"]))
        return cls(Y)


@dataclass(frozen=True, eq=False)
class StructuredRows:
    Y: np.ndarray  # (m, n1)
    Z: np.ndarray  # (m, n2)

    def __post_init__(self):
        Y = as_matrix(self.Y)
        Z = as_matrix(self.Z)
        if Y.shape[0] != Z.shape[0]:
            raise DimensionError(f"row counts differ: Y {Y.shape}, Z {Z.shape}")
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "Z", Z)

    def evaluate(self, u, v):
        """Factored form ``(Y_i u)(Z_i v)``."""
        return (self.Y @ as_vector(u)) * (self.Z @ as_vector(v))


def apply_linear(M, X):
    X = np.asarray(X, dtype=np.complex128)
    if X.shape != (M.n1, M.n2):
        raise DimensionError(f"X has shape {X.shape}, map expects {(M.n1, M.n2)}")
    return M.coefficient_matrix @ X.ravel()


def apply_bilinear(M, u, v):
    u = as_vector(u)
    v = as_vector(v)
    if u.shape[0] != M.n1 or v.shape[0] != M.n2:
        raise DimensionError(f"u, v have lengths {u.shape[0]}, {v.shape[0]}; map expects {M.n1}, {M.n2}")
    return apply_linear(M, np.outer(u, v))


def from_structured(S):
    # Y_i^(map) = Z_i^T Y_i, an (n2 x n1) outer product of rows
    return MeasurementMap(S.Z[:, :, None] * S.Y[:, None, :])


def random_dense_map(n1, n2, m, seed):
    if m < 1:
        raise PreconditionError("m must be positive")
    mats = [complex_normal(rng(seed, i), (n2, n1)) for i in range(m)]
    return MeasurementMap(np.stack(mats))


def random_structured_rows(n1, n2, m, seed):
    g = rng(seed)
    return StructuredRows(complex_normal(g, (m, n1)), complex_normal(g, (m, n2)))


def vectorization_map(n1, n2):
    """Coordinate functionals: ``M(X)`` lists the entries of ``X`` row by row."""
    Y = np.zeros((n1 * n2, n2, n1), dtype=np.complex128)
    for a in range(n1):
        for b in range(n2):
            Y[a * n2 + b, b, a] = 1.0
    return MeasurementMap(Y)


def restrict_to_subspaces(M, E, D):
    """Reduced map ``(x, y) -> B(E x, D y)`` on ``M(k, l)``."""
    E = as_matrix(E)
    D = as_matrix(D)
    if E.shape[0] != M.n1 or D.shape[0] != M.n2:
        raise DimensionError(f"bases of shapes {E.shape}, {D.shape} do not act on {(M.n1, M.n2)}")
    if numeric_rank(E) < E.shape[1] or numeric_rank(D) < D.shape[1]:
        raise PreconditionError("basis matrices must have full column rank")
    return MeasurementMap(np.einsum("ji,mjk,kl->mil", D, M.matrices, E))
