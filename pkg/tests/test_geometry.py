"""
Unit tests for sampling triplets and sliding-window arithmetic.
"""

# local imports
from gradflow.geometry.exceptions import GeometryError
from gradflow.geometry.sampling import (
    BackwardSampling,
    SamplingTriplet,
    backward_sampling,
)
from gradflow.geometry.windows import (
    backward_connectivity,
    dilate_internal,
    enumerate_patches,
    forward_connectivity,
    im2col,
    out_resolution,
    pad,
    roll_kernels,
    rot180_transpose_depth,
    unroll_kernels,
)

# 3rd party imports
import numpy as np
import pytest
from numpy.testing import assert_array_equal


@pytest.mark.parametrize(
    "k, s, p",
    [(0, 1, 0), (3, 0, 0), (3, 1, -1), (2.5, 1, 0), (True, 1, 0)],
)
def test_invalid_triplets_raise(k, s, p):
    with pytest.raises(GeometryError):
        SamplingTriplet(k, s, p)


@pytest.mark.parametrize(
    "r_in, k, s, p, expected",
    [
        (28, 5, 1, 0, 24),
        (24, 2, 2, 0, 12),
        (12, 5, 1, 0, 8),
        (8, 2, 2, 0, 4),
        (5, 3, 2, 0, 2),
        (5, 3, 2, 1, 3),
        (6, 3, 2, 0, 2),
    ],
)
def test_out_resolution(r_in, k, s, p, expected):
    assert out_resolution(r_in, SamplingTriplet(k, s, p)) == expected


def test_out_resolution_no_patch_fits():
    with pytest.raises(GeometryError):
        out_resolution(2, SamplingTriplet(5))


def test_exact_fit():
    assert SamplingTriplet(3, 2, 0).is_exact_fit(5)
    assert not SamplingTriplet(3, 2, 0).is_exact_fit(6)


def test_enumerate_patches_row_major():
    patches = enumerate_patches(5, SamplingTriplet(3, 2, 0))
    assert patches == [(0, 0), (0, 2), (2, 0), (2, 2)]


def test_pad_embeds_in_zero_canvas():
    a = np.ones((1, 1, 2, 2))
    padded = pad(a, 1)
    assert padded.shape == (1, 1, 4, 4)
    assert padded.sum() == 4.0
    assert padded[0, 0, 0, 0] == 0.0
    assert pad(a, 0) is a


def test_dilate_internal():
    delta = np.arange(4, dtype=np.float64).reshape(1, 1, 2, 2)
    dilated = dilate_internal(delta, 2)
    assert dilated.shape == (1, 1, 4, 4)
    assert_array_equal(dilated[0, 0, ::3, ::3], delta[0, 0])
    assert dilated.sum() == delta.sum()


def test_backward_sampling():
    back = backward_sampling(SamplingTriplet(3, 2, 1))
    assert back == BackwardSampling(SamplingTriplet(3, 1, 1), 1)


def test_backward_sampling_over_padded():
    with pytest.raises(GeometryError):
        backward_sampling(SamplingTriplet(3, 1, 3))


def test_im2col_columns_hold_patches():
    rng = np.random.default_rng(3)
    n, d, r = 2, 3, 5
    p = SamplingTriplet(3, 2, 1)
    a = rng.normal(size=(n, d, r, r))
    cols = im2col(a, p)
    r_out = out_resolution(r, p)
    assert cols.shape == (d * 9, r_out * r_out * n)
    padded = pad(a, 1)
    for q, (o_i, o_j) in enumerate(enumerate_patches(r, p)):
        for s in range(n):
            patch = padded[s, :, o_i : o_i + 3, o_j : o_j + 3]
            assert_array_equal(cols[:, q * n + s], patch.reshape(-1))


def test_unroll_roll_kernels():
    w = np.arange(2 * 3 * 2 * 2, dtype=np.float64).reshape(2, 3, 2, 2)
    unrolled = unroll_kernels(w)
    assert unrolled.shape == (2, 12)
    assert_array_equal(roll_kernels(unrolled, 3, 2), w)
    with pytest.raises(GeometryError):
        roll_kernels(unrolled, 2, 2)


def test_unroll_rejects_rectangular_kernels():
    with pytest.raises(GeometryError):
        unroll_kernels(np.ones((1, 1, 2, 3)))


def test_rot180_transpose_depth():
    rng = np.random.default_rng(1)
    w = rng.normal(size=(4, 2, 3, 3))
    rotated = rot180_transpose_depth(w)
    assert rotated.shape == (2, 4, 3, 3)
    for c_out in range(4):
        for c_in in range(2):
            for i in range(3):
                for j in range(3):
                    assert rotated[c_in, c_out, i, j] == w[c_out, c_in, 2 - i, 2 - j]


def test_connectivity_preserved_by_fractional_stride():
    p = SamplingTriplet(3, 2, 0)
    forward = forward_connectivity(5, p)
    assert len(forward) == 4 * 9
    assert forward == backward_connectivity(5, p)


@pytest.mark.parametrize(
    "r_in, k, s, p",
    [(6, 3, 1, 1), (7, 3, 2, 1), (8, 2, 2, 0), (9, 5, 2, 2)],
)
def test_connectivity_preserved_on_exact_fits(r_in, k, s, p):
    triplet = SamplingTriplet(k, s, p)
    assert triplet.is_exact_fit(r_in)
    assert forward_connectivity(r_in, triplet) == backward_connectivity(
        r_in, triplet
    )
