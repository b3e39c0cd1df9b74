"""
Base class shared by every layer: the train/infer mode contract and the
one-forward-one-backward cache cycle.
"""

# standard library imports
import abc
import logging

# current package imports
from .exceptions import LayerUsageError
from .param import ParamTensor

# local imports
from gradflow.tensor.exceptions import ShapeError

# 3rd party imports
import numpy as np

TRAIN = "train"
INFER = "infer"
MODES = (TRAIN, INFER)


def check_valid_mode(mode: str) -> str | None:
    """
    Returns an error message if 'mode' is not 'train' or 'infer'.
    """
    if mode not in MODES:
        return f"Invalid mode '{mode}'. Valid options: {list(MODES)}"
    return None


def assert_valid_mode(mode: str) -> None:
    """
    Raises LayerUsageError if 'mode' is not 'train' or 'infer'.
    """
    msg = check_valid_mode(mode)
    if msg:
        logging.error(msg)
        raise LayerUsageError(msg)


class Layer(abc.ABC):
    """
    A layer A_i = f(A_{i-1}, P_{i-1}).

    A train-mode forward stores whatever the backward rule needs; the following
    backward consumes it and writes the parameter gradients. Infer-mode forwards
    leave no cache.
    """

    kind = "layer"

    def __init__(self, index: int = None) -> None:
        self._index = index
        self._cache = None
        self._params: list[ParamTensor] = []

    @property
    def index(self) -> int | None:
        """Returns the position of the layer in its network, if any."""
        return self._index

    @property
    def params(self) -> list[ParamTensor]:
        """Returns the trainable parameters, weights before biases."""
        return list(self._params)

    @property
    def has_cache(self) -> bool:
        """Returns True between a train-mode forward and its backward."""
        return self._cache is not None

    @property
    def cache(self):
        """Returns the forward-pass cache (None outside a train cycle)."""
        return self._cache

    def param_name(self, prefix: str) -> str:
        """Returns e.g. 'w4' for prefix 'w' on layer 4, or just 'w' if unindexed."""
        return prefix if self._index is None else f"{prefix}{self._index}"

    def forward(self, a: np.ndarray, mode: str = TRAIN) -> np.ndarray:
        """
        Runs the forward rule. In train mode the cache is (re)filled.

        Parameters
        ----------
        a: np.ndarray
            Input data array A_{i-1}.
        mode: str
            'train' or 'infer'.

        Returns
        -------
        np.ndarray
            Output data array A_i.
        """
        assert_valid_mode(mode)
        out, cache = self._forward(a, mode)
        self._cache = cache if mode == TRAIN else None
        return out

    def backward(self, delta: np.ndarray) -> np.ndarray:
        """
        Runs the backward rule on the upstream error, stores the parameter
        gradients and invalidates the cache.

        Parameters
        ----------
        delta: np.ndarray
            Upstream error Delta_i, same shape as A_i.

        Returns
        -------
        np.ndarray
            Downstream error Delta_{i-1}, same shape as A_{i-1}.

        Raises
        ------
        LayerUsageError
            If no train-mode forward precedes the call.
        """
        if self._cache is None:
            msg = (
                f"Layer {self.describe()} has no forward cache; run a train-mode "
                "forward before backward."
            )
            logging.error(msg)
            raise LayerUsageError(msg)
        cache, self._cache = self._cache, None
        return self._backward(delta, cache)

    def clear_cache(self) -> None:
        """Drops any cached forward values."""
        self._cache = None

    def describe(self) -> str:
        """Returns a short human readable description of the layer."""
        where = "" if self._index is None else f" #{self._index}"
        return f"{self.kind}{where}"

    def state_tensors(self) -> dict[str, np.ndarray]:
        """
        Returns non-trainable arrays to persist with the parameters (e.g. running
        statistics). Empty by default.
        """
        return {}

    @abc.abstractmethod
    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        """
        Returns the per-sample output shape for a per-sample input shape, or
        raises if the layer cannot accept that shape.
        """
        pass

    @abc.abstractmethod
    def _forward(self, a: np.ndarray, mode: str) -> tuple[np.ndarray, object]:
        pass

    @abc.abstractmethod
    def _backward(self, delta: np.ndarray, cache) -> np.ndarray:
        pass

    def shape_error(self, msg: str) -> ShapeError:
        """Logs 'msg' and returns a ShapeError prefixed with the layer description."""
        msg = f"{self.describe()}: {msg}"
        logging.error(msg)
        return ShapeError(msg)

    def load_state_tensor(self, name: str, value: np.ndarray) -> None:
        """
        Restores one array previously returned by state_tensors().

        Raises
        ------
        LayerUsageError
            If the layer has no state tensor called 'name'.
        """
        msg = f"Layer {self.describe()} has no state tensor named '{name}'."
        logging.error(msg)
        raise LayerUsageError(msg)
