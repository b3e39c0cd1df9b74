"""
Max pooling: each output cell is the maximum of its k x k patch; the backward
pass routes the upstream error to the cell that won the forward max.

Notes
-----
- Ties go to the first occurrence in a row-major scan of the patch.
- Padding cells are zeros, like every other sliding-window canvas.
"""

# standard library imports
import logging
from typing import NamedTuple

# current package imports
from .exceptions import LayerUsageError
from .layer import Layer

# local imports
from gradflow.geometry.exceptions import GeometryError
from gradflow.geometry.sampling import SamplingTriplet
from gradflow.geometry.windows import extract_windows, out_resolution

# 3rd party imports
import numpy as np


class MaxPoolCache(NamedTuple):
    """
    Per output cell, the flat index (row * R + col) of the selected maximum in
    the padded R x R canvas, plus the shapes needed to route errors back.
    """

    argmax: np.ndarray
    input_shape: tuple[int, int, int, int]
    padding: int


def maxpool_forward(
    a: np.ndarray, p: SamplingTriplet
) -> tuple[np.ndarray, MaxPoolCache]:
    """
    Max over every patch of every activation map; depth is preserved.

    Returns
    -------
    tuple[np.ndarray, MaxPoolCache]
        Output of shape n x d x r_out x r_out and the argmax cache.
    """
    windows = extract_windows(a, p)
    n, d, r_out, _, k, _ = windows.shape
    flat_windows = windows.reshape(n, d, r_out, r_out, k * k)
    local = np.argmax(flat_windows, axis=-1)
    out = np.take_along_axis(flat_windows, local[..., np.newaxis], axis=-1)[..., 0]

    r_padded = a.shape[2] + 2 * p.p
    origins = np.arange(r_out) * p.s
    rows = origins[:, np.newaxis] + local // k
    cols = origins[np.newaxis, :] + local % k
    argmax = rows * r_padded + cols
    return np.ascontiguousarray(out), MaxPoolCache(argmax, a.shape, p.p)


def maxpool_backward(
    delta: np.ndarray, cache: MaxPoolCache, p: SamplingTriplet
) -> np.ndarray:
    """
    Routes each upstream error to the cached argmax cell of its patch;
    overlapping patches accumulate additively.

    Raises
    ------
    LayerUsageError
        If the cache is missing or does not match the error shape.
    """
    if cache is None or delta.shape != cache.argmax.shape:
        msg = (
            f"maxpool_backward: error of shape {delta.shape} does not match the "
            f"cached output shape {None if cache is None else cache.argmax.shape}."
        )
        logging.error(msg)
        raise LayerUsageError(msg)
    if cache.padding != p.p:
        msg = (
            f"maxpool_backward: cache was built with padding {cache.padding}, "
            f"not {p}."
        )
        logging.error(msg)
        raise LayerUsageError(msg)

    n, d, r_h, r_w = cache.input_shape
    r_padded = r_h + 2 * p.p
    grad = np.zeros((n * d, r_padded * r_padded), dtype=np.float64)
    rows = np.arange(n * d)[:, np.newaxis]
    np.add.at(grad, (rows, cache.argmax.reshape(n * d, -1)), delta.reshape(n * d, -1))
    grad = grad.reshape(n, d, r_padded, r_padded)
    return np.ascontiguousarray(grad[:, :, p.p : p.p + r_h, p.p : p.p + r_w])


class MaxPool(Layer):
    """
    Max pooling with sampling triplet p; no trainable parameters.
    """

    kind = "maxpool"

    def __init__(self, sampling: SamplingTriplet, index: int = None) -> None:
        super().__init__(index)
        self._sampling = sampling

    @property
    def sampling(self) -> SamplingTriplet:
        return self._sampling

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if len(input_shape) != 3:
            raise self.shape_error(
                f"expects image samples (d, r, r), got {tuple(input_shape)}."
            )
        d, r, _ = input_shape
        try:
            r_out = out_resolution(r, self._sampling)
        except GeometryError as e:
            raise self.shape_error(str(e)) from e
        return (d, r_out, r_out)

    def _forward(self, a, mode):
        return maxpool_forward(a, self._sampling)

    def _backward(self, delta, cache):
        return maxpool_backward(delta, cache, self._sampling)
