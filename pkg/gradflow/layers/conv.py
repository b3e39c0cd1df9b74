"""
Convolution layer.

The forward pass is lowered to a single GEMM: A_i = f4d[unroll(w) . im2col(A)]
plus a depth-indexed bias. The input gradient is a fractionally strided
convolution: the error is dilated with s - 1 internal zeros, padded by
k - p - 1 and convolved at unit stride with the depth-transposed, 180-degree
rotated kernels.
"""

# standard library imports
import logging
from typing import NamedTuple

# current package imports
from .exceptions import LayerUsageError
from .layer import Layer
from .param import ParamTensor

# local imports
from gradflow.geometry.exceptions import GeometryError
from gradflow.geometry.sampling import SamplingTriplet, backward_sampling
from gradflow.geometry.windows import (
    dilate_internal,
    enumerate_patches,
    im2col,
    out_resolution,
    pad,
    roll_kernels,
    rot180_transpose_depth,
    unroll_kernels,
)
from gradflow.tensor.exceptions import ShapeError
from gradflow.tensor.ops import (
    assert_rank,
    broadcast_add_bias,
    contract_bias_4d,
    f2d,
    f4d,
    matmul,
    transpose,
)

# 3rd party imports
import numpy as np


class ConvCache(NamedTuple):
    """
    Values retained by conv_forward_gemm for conv_backward.
    """

    a: np.ndarray
    cols: np.ndarray
    out_shape: tuple[int, int, int, int]


def _assert_conv_operands(a: np.ndarray, w: np.ndarray, b: np.ndarray) -> None:
    assert_rank(a, 4, "a")
    assert_rank(w, 4, "w")
    assert_rank(b, 1, "b")
    if w.shape[1] != a.shape[1]:
        msg = (
            f"Convolution depth mismatch: kernels of shape {w.shape} expect input "
            f"depth {w.shape[1]}, got input of shape {a.shape}."
        )
        logging.error(msg)
        raise ShapeError(msg)
    if b.shape[0] != w.shape[0]:
        msg = f"Bias of shape {b.shape} does not match kernels of shape {w.shape}."
        logging.error(msg)
        raise ShapeError(msg)
    if w.shape[2] != w.shape[3]:
        msg = f"Kernels must be square, got shape {w.shape}."
        logging.error(msg)
        raise ShapeError(msg)


def _assert_kernel_matches(w: np.ndarray, p: SamplingTriplet) -> None:
    if w.shape[2] != p.k:
        msg = f"Kernels of shape {w.shape} do not match sampling {p}."
        logging.error(msg)
        raise GeometryError(msg)


def conv_forward_gemm(
    a: np.ndarray, w: np.ndarray, b: np.ndarray, p: SamplingTriplet
) -> tuple[np.ndarray, ConvCache]:
    """
    Convolution of an n x d_in x r x r input with d_out x d_in x k x k kernels
    as one matrix product with the im2col lowering of the input.

    Returns
    -------
    tuple[np.ndarray, ConvCache]
        The n x d_out x r_out x r_out output and the cache {a, im2col(a)}.
    """
    _assert_conv_operands(a, w, b)
    _assert_kernel_matches(w, p)
    n = a.shape[0]
    r_out = out_resolution(a.shape[2], p)
    cols = im2col(a, p)
    out = f4d(matmul(unroll_kernels(w), cols), n=n, r=r_out)
    out = broadcast_add_bias(out, b)
    return out, ConvCache(a, cols, out.shape)


def conv_forward_naive(
    a: np.ndarray, w: np.ndarray, b: np.ndarray, p: SamplingTriplet
) -> np.ndarray:
    """
    Sliding-window convolution: for every patch and every sample, the tensor
    contraction of the kernels with the patch, plus the bias.
    """
    _assert_conv_operands(a, w, b)
    _assert_kernel_matches(w, p)
    n = a.shape[0]
    d_out = w.shape[0]
    r_out = out_resolution(a.shape[2], p)
    padded = pad(a, p.p)
    out = np.empty((n, d_out, r_out, r_out), dtype=np.float64)
    for q, (row, col) in enumerate(enumerate_patches(a.shape[2], p)):
        o_i, o_j = divmod(q, r_out)
        for s in range(n):
            patch = padded[s, :, row : row + p.k, col : col + p.k]
            out[s, :, o_i, o_j] = np.tensordot(w, patch, axes=3) + b
    return out


def conv_backward(
    delta: np.ndarray, cache: ConvCache, w: np.ndarray, p: SamplingTriplet
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Backward rule of the convolution.

    Returns
    -------
    tuple[np.ndarray, np.ndarray, np.ndarray]
        delta_in (shape of the input), dW = roll[f2d(delta) . im2col(a)^t] and
        dB = sum of delta over samples and space.

    Raises
    ------
    LayerUsageError
        If the cache is missing or its output shape disagrees with 'delta'.
    """
    if cache is None:
        msg = "conv_backward: missing forward cache."
        logging.error(msg)
        raise LayerUsageError(msg)
    if delta.shape != tuple(cache.out_shape):
        msg = (
            f"conv_backward: error of shape {delta.shape} does not match the cached "
            f"output shape {tuple(cache.out_shape)}."
        )
        logging.error(msg)
        raise LayerUsageError(msg)

    n, d_in, r_in, _ = cache.a.shape
    d_w = roll_kernels(matmul(f2d(delta), transpose(cache.cols)), d_in=d_in, k=p.k)
    d_b = contract_bias_4d(delta)
    delta_in = fractionally_strided_conv(delta, w, p, r_in)
    return delta_in, d_w, d_b


def fractionally_strided_conv(
    delta: np.ndarray, w: np.ndarray, p: SamplingTriplet, r_in: int
) -> np.ndarray:
    """
    Propagates the error of a convolution back to its input.

    Trailing input cells that no forward window reached (inexact fit) receive
    zero error.
    """
    back = backward_sampling(p)
    dilated = dilate_internal(delta, back.internal_gap)
    w_hat = rot180_transpose_depth(w)
    zeros = np.zeros(w_hat.shape[0], dtype=np.float64)
    delta_in, _ = conv_forward_gemm(dilated, w_hat, zeros, back.base)
    r_back = delta_in.shape[2]
    if r_back < r_in:
        missing = r_in - r_back
        delta_in = np.pad(delta_in, ((0, 0), (0, 0), (0, missing), (0, missing)))
    return delta_in


class Convolution(Layer):
    """
    Convolution with kernels w (d_out x d_in x k x k), biases b (d_out) and
    sampling triplet p.
    """

    kind = "conv"

    def __init__(
        self,
        w: np.ndarray,
        b: np.ndarray,
        sampling: SamplingTriplet,
        index: int = None,
    ) -> None:
        super().__init__(index)
        w = np.asarray(w, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        assert_rank(w, 4, "w")
        _assert_conv_operands(np.zeros((1, w.shape[1], 1, 1)), w, b)
        _assert_kernel_matches(w, sampling)
        self._sampling = sampling
        self._w = ParamTensor(self.param_name("w"), w)
        self._b = ParamTensor(self.param_name("b"), b)
        self._params = [self._w, self._b]

    @property
    def w(self) -> ParamTensor:
        return self._w

    @property
    def b(self) -> ParamTensor:
        return self._b

    @property
    def sampling(self) -> SamplingTriplet:
        return self._sampling

    @property
    def in_depth(self) -> int:
        return self._w.shape[1]

    @property
    def out_depth(self) -> int:
        return self._w.shape[0]

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if len(input_shape) != 3:
            raise self.shape_error(
                f"expects image samples (d, r, r), got {tuple(input_shape)}."
            )
        d, r, _ = input_shape
        if d != self.in_depth:
            raise self.shape_error(
                f"expects input depth {self.in_depth}, got {d}."
            )
        try:
            r_out = out_resolution(r, self._sampling)
        except GeometryError as e:
            raise self.shape_error(str(e)) from e
        return (self.out_depth, r_out, r_out)

    def _forward(self, a, mode):
        out, cache = conv_forward_gemm(a, self._w.value, self._b.value, self._sampling)
        return out, cache

    def _backward(self, delta, cache):
        delta_in, d_w, d_b = conv_backward(delta, cache, self._w.value, self._sampling)
        self._w.set_grad(d_w)
        self._b.set_grad(d_b)
        return delta_in
