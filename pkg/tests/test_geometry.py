import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from uiot.errors import DimensionMismatch, EmptySet, ZeroVector
from uiot.geometry import cosine_distance, normalize, normalize_rows, pairwise_cost

from conftest import unit_rows

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])


def test_normalize_345_triangle():
    np.testing.assert_allclose(normalize(np.array([3.0, 4.0])), [0.6, 0.8], atol=1e-12)


def test_normalize_already_unit():
    np.testing.assert_allclose(normalize(E1), E1, atol=0)


def test_normalize_zero_vector_rejected():
    with pytest.raises(ZeroVector):
        normalize(np.array([0.0, 0.0]))


def test_normalize_rows_flags_zero_row():
    with pytest.raises(ZeroVector):
        normalize_rows(np.array([[1.0, 0.0], [0.0, 0.0]]))


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=16))
def test_normalize_idempotent(values):
    v = np.asarray(values)
    if not np.any(v):
        return
    once = normalize(v)
    np.testing.assert_allclose(normalize(once), once, atol=1e-9)
    assert abs(np.linalg.norm(once) - 1.0) <= 1e-6


def test_cosine_identical_orthogonal_antipodal():
    assert cosine_distance(E1, E1) == pytest.approx(0.0, abs=1e-12)
    assert cosine_distance(E1, E2) == pytest.approx(1.0, abs=1e-12)
    assert cosine_distance(E1, -E1) == pytest.approx(2.0, abs=1e-12)


def test_cosine_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine_distance(E1, np.array([1.0, 0.0]))


def test_pairwise_trivial_cases():
    np.testing.assert_allclose(pairwise_cost(E1[None], E1[None]), [[0.0]], atol=1e-12)
    np.testing.assert_allclose(
        pairwise_cost(np.vstack([E1, E2]), E2[None]), [[1.0], [0.0]], atol=1e-12
    )


def test_pairwise_matches_scalar_elementwise(rng):
    a = unit_rows(rng, 3, 8)
    b = unit_rows(rng, 4, 8)
    cost = pairwise_cost(a, b)
    for i in range(3):
        for j in range(4):
            assert cost[i, j] == pytest.approx(cosine_distance(a[i], b[j]), abs=1e-12)


def test_pairwise_transpose_symmetry_and_range(rng):
    for _ in range(10):
        a = unit_rows(rng, 5, 6)
        b = unit_rows(rng, 7, 6)
        cost = pairwise_cost(a, b)
        np.testing.assert_allclose(cost.T, pairwise_cost(b, a), atol=1e-9)
        assert cost.min() >= 0.0 and cost.max() <= 2.0


def test_pairwise_rejects_empty_and_mismatched():
    with pytest.raises(EmptySet):
        pairwise_cost(np.zeros((0, 3)), E1[None])
    with pytest.raises(DimensionMismatch):
        pairwise_cost(E1[None], np.array([[1.0, 0.0]]))
