"""
Unit tests for the dense array helpers in tensor.ops.
"""

# local imports
from gradflow.tensor.exceptions import ShapeError
from gradflow.tensor import ops

# 3rd party imports
import numpy as np
import pytest
from numpy.testing import assert_array_equal, assert_allclose


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def test_matrix_from_flat_values():
    m = ops.matrix([1, 2, 3, 4, 5, 6], rows=2, cols=3)
    assert m.shape == (2, 3)
    assert m.dtype == np.float64
    assert m[1, 0] == 4.0


def test_matrix_wrong_count_raises():
    with pytest.raises(ShapeError):
        ops.matrix([1, 2, 3], rows=2, cols=2)


def test_tensor4_from_flat_values():
    t = ops.tensor4(np.arange(24), n=1, d=2, r_h=3, r_w=4)
    assert t.shape == (1, 2, 3, 4)
    assert t[0, 1, 0, 0] == 12.0


def test_matmul_shape_mismatch_names_both_shapes():
    with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 3\)"):
        ops.matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_matmul_matches_numpy(rng):
    a = rng.normal(size=(4, 3))
    b = rng.normal(size=(3, 5))
    assert_allclose(ops.matmul(a, b), a @ b)


def test_hadamard_requires_same_shape():
    with pytest.raises(ShapeError):
        ops.hadamard(np.ones((2, 2)), np.ones((2, 3)))


def test_feature_dot_sums_to_frobenius(rng):
    a = rng.normal(size=(5, 4))
    b = rng.normal(size=(5, 4))
    dots = ops.feature_dot(a, b)
    assert dots.shape == (5,)
    assert np.sum(dots) == pytest.approx(ops.frobenius(a, b), rel=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_frobenius_moves_matrix_factors(seed):
    a, b, c = np.random.default_rng(seed).normal(size=(3, 5, 5))
    direct = ops.frobenius(a, ops.matmul(b, c))
    assert abs(direct - ops.frobenius(ops.matmul(ops.transpose(b), a), c)) <= 1e-12
    assert abs(direct - ops.frobenius(ops.matmul(a, ops.transpose(c)), b)) <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_frobenius_moves_hadamard_factors(seed):
    a, b, c = np.random.default_rng(seed).normal(size=(3, 5, 5))
    left = ops.frobenius(a, ops.hadamard(b, c))
    assert abs(left - ops.frobenius(ops.hadamard(a, b), c)) <= 1e-12


def test_frobenius_moves_column_scaling(rng):
    a = rng.normal(size=(6, 4))
    b = rng.normal(size=(6, 4))
    x = rng.normal(size=4)
    left = ops.frobenius(a, ops.diag_broadcast_mul(b, x))
    right = float(np.dot(ops.hadamard(a, b).sum(axis=0), x))
    assert abs(left - right) <= 1e-12


def test_contract_bias_of_broadcast_zeros_is_exact():
    b = np.array([0.5, -2.5, 3.0])
    out = ops.broadcast_add_bias(np.zeros((4, 3)), b)
    assert_array_equal(ops.contract_bias(out), 4 * b)


def test_broadcast_add_bias_matrix():
    out = ops.broadcast_add_bias(np.zeros((3, 2)), np.array([1.0, -1.0]))
    assert_array_equal(out, [[1, -1], [1, -1], [1, -1]])


def test_broadcast_add_bias_tensor4_is_depth_indexed():
    out = ops.broadcast_add_bias(np.zeros((2, 3, 4, 4)), np.array([1.0, 2.0, 3.0]))
    for c in range(3):
        assert np.all(out[:, c] == c + 1)


def test_broadcast_add_bias_wrong_length_raises():
    with pytest.raises(ShapeError):
        ops.broadcast_add_bias(np.zeros((2, 3, 4, 4)), np.array([1.0, 2.0]))


def test_contract_bias_sums_over_samples_and_space(rng):
    delta = rng.normal(size=(2, 3, 4, 4))
    assert_allclose(ops.contract_bias_4d(delta), delta.sum(axis=(0, 2, 3)))
    m = rng.normal(size=(6, 3))
    assert_allclose(ops.contract_bias(m), m.sum(axis=0))


def test_diag_broadcast_mul_equals_diag_product(rng):
    a = rng.normal(size=(4, 3))
    w = rng.normal(size=3)
    assert_allclose(ops.diag_broadcast_mul(a, w), a @ np.diag(w), atol=1e-15)


def test_diag_requires_square():
    assert_array_equal(ops.diag(np.eye(3) * 2), [2, 2, 2])
    with pytest.raises(ShapeError):
        ops.diag(np.ones((2, 3)))


def test_f2d_t_row_order():
    n, d, r = 2, 3, 2
    a = np.arange(n * d * r * r, dtype=np.float64).reshape(n, d, r, r)
    folded = ops.f2d_t(a)
    assert folded.shape == (r * r * n, d)
    for s in range(n):
        for c in range(d):
            for i in range(r):
                for j in range(r):
                    assert folded[(i * r + j) * n + s, c] == a[s, c, i, j]


def test_f4d_t_inverts_f2d_t(rng):
    a = rng.normal(size=(3, 2, 5, 5))
    assert_array_equal(ops.f4d_t(ops.f2d_t(a), n=3, d=2, r=5), a)
    assert_array_equal(ops.f4d(ops.f2d(a), n=3, r=5), a)


def test_f4d_t_rejects_inconsistent_dims():
    with pytest.raises(ShapeError):
        ops.f4d_t(np.ones((8, 3)), n=2, d=3, r=3)


@pytest.mark.parametrize("rank", [1, 3])
def test_assert_rank_rejects_other_ranks(rank):
    with pytest.raises(ShapeError):
        ops.assert_rank(np.ones((2,) * rank), 2, "a")


def test_assert_rank_rejects_empty_dimension():
    with pytest.raises(ShapeError):
        ops.assert_rank(np.ones((0, 3)), 2, "a")
