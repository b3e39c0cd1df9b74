"""
Fully connected layer: A_i = A_{i-1} w + b (b broadcast over samples).
"""

# standard library imports
import logging

# current package imports
from .exceptions import LayerUsageError
from .layer import Layer
from .param import ParamTensor

# local imports
from gradflow.tensor.exceptions import ShapeError
from gradflow.tensor.ops import (
    assert_rank,
    broadcast_add_bias,
    contract_bias,
    matmul,
    transpose,
)

# 3rd party imports
import numpy as np


def fc_forward(
    a: np.ndarray, w: np.ndarray, b: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Affine transformation of an n x f_in Matrix.

    Parameters
    ----------
    a: np.ndarray
        n x f_in input.
    w: np.ndarray
        f_in x f_out weights.
    b: np.ndarray
        Length f_out bias.

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        The n x f_out output and the cache (the input).
    """
    return broadcast_add_bias(matmul(a, w), b), a


def fc_backward(
    delta: np.ndarray, cache: np.ndarray, w: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Backward rule of the fully connected layer.

    Returns
    -------
    tuple[np.ndarray, np.ndarray, np.ndarray]
        delta_in = delta w^t, dW = a^t delta, dB = sum over samples of delta.
    """
    if cache is None:
        msg = "fc_backward: missing forward cache."
        logging.error(msg)
        raise LayerUsageError(msg)
    delta_in = matmul(delta, transpose(w))
    d_w = matmul(transpose(cache), delta)
    d_b = contract_bias(delta)
    return delta_in, d_w, d_b


class FullyConnected(Layer):
    """
    Fully connected layer with weights w (f_in x f_out) and biases b (f_out).
    """

    kind = "fc"

    def __init__(self, w: np.ndarray, b: np.ndarray, index: int = None) -> None:
        super().__init__(index)
        assert_rank(np.asarray(w), 2, "w")
        assert_rank(np.asarray(b), 1, "b")
        if np.shape(b)[0] != np.shape(w)[1]:
            msg = f"Bias of shape {np.shape(b)} does not match weights {np.shape(w)}."
            logging.error(msg)
            raise ShapeError(msg)
        self._w = ParamTensor(self.param_name("w"), w)
        self._b = ParamTensor(self.param_name("b"), b)
        self._params = [self._w, self._b]

    @property
    def w(self) -> ParamTensor:
        """Returns the weight parameter."""
        return self._w

    @property
    def b(self) -> ParamTensor:
        """Returns the bias parameter."""
        return self._b

    @property
    def in_features(self) -> int:
        return self._w.shape[0]

    @property
    def out_features(self) -> int:
        return self._w.shape[1]

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if tuple(input_shape) != (self.in_features,):
            raise self.shape_error(
                f"expects {self.in_features} features per sample, "
                f"got per-sample shape {tuple(input_shape)}."
            )
        return (self.out_features,)

    def _forward(self, a, mode):
        return fc_forward(a, self._w.value, self._b.value)

    def _backward(self, delta, cache):
        delta_in, d_w, d_b = fc_backward(delta, cache, self._w.value)
        self._w.set_grad(d_w)
        self._b.set_grad(d_b)
        return delta_in
