"""
Named trainable arrays paired with their gradient accumulators.
"""

# standard library imports
import logging

# current package imports
from .exceptions import LayerUsageError

# 3rd party imports
import numpy as np


class ParamTensor:
    """
    A trainable array (weights or biases) and the gradient of the minibatch
    loss with respect to it.

    Attributes
    ----------
    name : str
        Identifier, e.g. 'w4' or 'b4' for the parameters of layer 4.
    value : np.ndarray
        Current parameter values (float64). Updated in place.
    grad : np.ndarray
        Gradient accumulator with the same shape as 'value'.
    """

    def __init__(self, name: str, value: np.ndarray) -> None:
        self._name = name
        self._value = np.array(value, dtype=np.float64)
        self._grad = np.zeros_like(self._value)

    @property
    def name(self) -> str:
        """Returns the parameter name."""
        return self._name

    @property
    def value(self) -> np.ndarray:
        """Returns the parameter array."""
        return self._value

    @property
    def grad(self) -> np.ndarray:
        """Returns the gradient array."""
        return self._grad

    @property
    def shape(self) -> tuple[int, ...]:
        """Returns the parameter shape."""
        return self._value.shape

    @property
    def size(self) -> int:
        """Returns the number of trainable scalars."""
        return int(self._value.size)

    def _assert_same_shape(self, array: np.ndarray, what: str) -> None:
        if array.shape != self._value.shape:
            msg = (
                f"{what} of shape {array.shape} does not match parameter "
                f"'{self._name}' of shape {self._value.shape}."
            )
            logging.error(msg)
            raise LayerUsageError(msg)

    def set_value(self, value: np.ndarray) -> None:
        """
        Overwrites the parameter values in place, keeping every reference to the
        underlying array valid.

        Raises
        ------
        LayerUsageError
            If 'value' has a different shape.
        """
        value = np.asarray(value, dtype=np.float64)
        self._assert_same_shape(value, "Value")
        self._value[...] = value

    def set_grad(self, grad: np.ndarray) -> None:
        """Stores 'grad' as the gradient of this parameter."""
        grad = np.asarray(grad, dtype=np.float64)
        self._assert_same_shape(grad, "Gradient")
        self._grad[...] = grad

    def zero_grad(self) -> None:
        """Resets the gradient to zero."""
        self._grad.fill(0.0)

    def __str__(self) -> str:
        return f"ParamTensor({self._name}, shape={self._value.shape})"
