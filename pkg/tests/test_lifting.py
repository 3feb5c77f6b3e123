import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bilinid.errors import DimensionError, PreconditionError
from bilinid.lifting import (MeasurementMap, StructuredRows, from_structured, random_dense_map,
                             random_structured_rows, restrict_to_subspaces, vectorization_map)
from bilinid.numerics import complex_normal, rng


def test_apply_is_trace_pairing(gen):
    M = random_dense_map(3, 4, 5, seed=1)
    X = complex_normal(gen, (3, 4))
    expected = [np.trace(Y @ X) for Y in M.matrices]
    assert np.allclose(M.apply(X), expected)


def test_bilinear_uses_plain_transpose(gen):
    M = random_dense_map(3, 2, 4, seed=2)
    u, v = complex_normal(gen, (3,)), complex_normal(gen, (2,))
    expected = [v @ Y @ u for Y in M.matrices]  # tr(Y u v^T) = v^T Y u
    assert np.allclose(M(u, v), expected)


def test_coefficient_views_agree(gen):
    M = random_dense_map(2, 3, 4, seed=3)
    X = complex_normal(gen, (2, 3))
    assert np.allclose(M.coefficient_matrix @ X.ravel(), np.einsum("iab,ab->i", M.tensor, X))
    assert np.allclose(M.coefficient_matrix[1], M.matrices[1].T.ravel())


def test_map_is_immutable():
    M = random_dense_map(2, 2, 2, seed=0)
    with pytest.raises(ValueError):
        M.matrices[0, 0, 0] = 1.0


def test_shape_errors():
    M = random_dense_map(2, 3, 4, seed=0)
    with pytest.raises(DimensionError):
        M.apply(np.zeros((3, 2)))
    with pytest.raises(DimensionError):
        M(np.ones(3), np.ones(3))
    with pytest.raises(DimensionError):
        MeasurementMap(np.zeros((2, 2)))
    with pytest.raises(PreconditionError):
        random_dense_map(2, 2, 0, seed=0)


def test_append_stacks_measurements(gen):
    M1, M2 = random_dense_map(2, 3, 2, seed=0), random_dense_map(2, 3, 3, seed=1)
    X = complex_normal(gen, (2, 3))
    assert np.allclose(M1.append(M2).apply(X), np.concatenate([M1.apply(X), M2.apply(X)]))
    with pytest.raises(DimensionError):
        M1.append(random_dense_map(3, 2, 1, seed=0))


def test_dict_round_trip():
    M = random_dense_map(2, 3, 4, seed=5)
    assert np.array_equal(MeasurementMap.from_dict(M.to_dict()).matrices, M.matrices)


def test_dense_maps_are_seeded():
    assert np.array_equal(random_dense_map(3, 3, 4, 7).matrices, random_dense_map(3, 3, 4, 7).matrices)
    # rows are drawn per index, so more rows extend the same map
    assert np.array_equal(random_dense_map(3, 3, 5, 7).matrices[:4], random_dense_map(3, 3, 4, 7).matrices)


def test_structured_rows_factor(gen):
    S = random_structured_rows(3, 4, 6, seed=1)
    u, v = complex_normal(gen, (3,)), complex_normal(gen, (4,))
    assert np.allclose(from_structured(S)(u, v), (S.Y @ u) * (S.Z @ v))
    assert np.allclose(S.evaluate(u, v), (S.Y @ u) * (S.Z @ v))
    with pytest.raises(DimensionError):
        StructuredRows(np.ones((2, 3)), np.ones((3, 3)))


def test_vectorization_map_lists_entries(gen):
    X = complex_normal(gen, (2, 3))
    assert np.allclose(vectorization_map(2, 3).apply(X), X.ravel())


def test_restriction_composes(gen):
    M = random_dense_map(5, 4, 6, seed=4)
    E, D = complex_normal(gen, (5, 2)), complex_normal(gen, (4, 3))
    R = restrict_to_subspaces(M, E, D)
    x, y = complex_normal(gen, (2,)), complex_normal(gen, (3,))
    assert (R.n1, R.n2) == (2, 3)
    assert np.allclose(R(x, y), M(E @ x, D @ y))
    with pytest.raises(PreconditionError):
        restrict_to_subspaces(M, np.ones((5, 2)), D)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32))
def test_bilinearity(n1, n2, m, seed):
    g = rng(seed)
    M = random_dense_map(n1, n2, m, seed)
    u, u2 = complex_normal(g, (2, n1))
    v, v2 = complex_normal(g, (2, n2))
    a, b = complex_normal(g, (2,))
    assert np.allclose(M(a * u + b * u2, v), a * M(u, v) + b * M(u2, v))
    assert np.allclose(M(u, a * v + b * v2), a * M(u, v) + b * M(u, v2))
