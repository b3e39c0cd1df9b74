"""
Flatten layer: reshapes each n x d x r x r sample into a d * r * r feature
vector (depth-major, then row, then column) and folds errors back.
"""

# standard library imports
import logging

# current package imports
from .exceptions import LayerUsageError
from .layer import Layer

# local imports
from gradflow.tensor.ops import assert_rank

# 3rd party imports
import numpy as np


def flatten_forward(a: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """
    Returns the n x (d * r * r) Matrix and the original shape as cache.
    """
    assert_rank(a, 4, "a")
    n = a.shape[0]
    return np.ascontiguousarray(a).reshape(n, -1), a.shape


def fold_backward(delta: np.ndarray, cache: tuple[int, ...]) -> np.ndarray:
    """
    Inverse of flatten_forward for the error array.

    Raises
    ------
    LayerUsageError
        If 'delta' cannot be folded into the cached shape.
    """
    n, d, r_h, r_w = cache
    if delta.shape != (n, d * r_h * r_w):
        msg = (
            f"fold_backward: error of shape {delta.shape} does not match the cached "
            f"input shape {tuple(cache)}."
        )
        logging.error(msg)
        raise LayerUsageError(msg)
    return np.ascontiguousarray(delta).reshape(cache)


class Flatten(Layer):
    """
    Turns image data into feature vectors; no trainable parameters.
    """

    kind = "flatten"

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if len(input_shape) != 3:
            raise self.shape_error(
                f"expects image samples (d, r, r), got "
                f"{tuple(input_shape)}."
            )
        d, r_h, r_w = input_shape
        return (d * r_h * r_w,)

    def _forward(self, a, mode):
        return flatten_forward(a)

    def _backward(self, delta, cache):
        return fold_backward(delta, cache)
