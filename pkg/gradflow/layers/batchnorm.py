"""
Batch normalization: per-feature standardization with minibatch statistics
followed by a learned per-feature affine map.

Notes
-----
- Variance uses the biased 1/n convention, including in the running update.
- sigma = sqrt(var + eps).
- Image data (n x d x r x r) is viewed as an (r * r * n) x d Matrix through
  f2d_t, so every pixel of every sample counts towards the statistics of its
  depth slice (n_eff = n * r * r).
"""

# standard library imports
import logging
from typing import NamedTuple

# current package imports
from .exceptions import BatchSizeError, LayerUsageError
from .layer import INFER, TRAIN, Layer, assert_valid_mode
from .param import ParamTensor

# local imports
from gradflow.tensor.exceptions import ShapeError
from gradflow.tensor.ops import assert_rank, f2d_t, f4d_t

# 3rd party imports
import numpy as np

DEFAULT_MOMENTUM = 0.1
DEFAULT_EPS = 1e-5


class BatchNormState:
    """
    Parameters and population statistics of one batch normalization layer.

    Attributes
    ----------
    w : np.ndarray
        Per-feature scale (trainable).
    b : np.ndarray
        Per-feature shift (trainable).
    running_mean : np.ndarray
        Exponential moving average of the batch means, initialised to 0.
    running_var : np.ndarray
        Exponential moving average of the batch variances, initialised to 1.
    momentum : float
        Weight of the newest batch in the moving averages, in (0, 1].
    eps : float
        Added to the variance before the square root.
    """

    def __init__(
        self,
        w: np.ndarray,
        b: np.ndarray,
        running_mean: np.ndarray = None,
        running_var: np.ndarray = None,
        momentum: float = DEFAULT_MOMENTUM,
        eps: float = DEFAULT_EPS,
    ) -> None:
        w = np.asarray(w, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        assert_rank(w, 1, "w")
        if b.shape != w.shape:
            msg = f"Batch norm shift of shape {b.shape} does not match scale {w.shape}."
            logging.error(msg)
            raise ShapeError(msg)
        f = w.shape[0]
        if running_mean is None:
            running_mean = np.zeros(f)
        if running_var is None:
            running_var = np.ones(f)
        running_mean = np.array(running_mean, dtype=np.float64)
        running_var = np.array(running_var, dtype=np.float64)
        if running_mean.shape != (f,) or running_var.shape != (f,):
            msg = (
                f"Running statistics of shapes {running_mean.shape} and "
                f"{running_var.shape} do not match {f} features."
            )
            logging.error(msg)
            raise ShapeError(msg)
        if np.any(running_var < 0):
            msg = "Running variance must be non-negative."
            logging.error(msg)
            raise ValueError(msg)
        if not 0 < momentum <= 1:
            msg = f"Batch norm momentum must lie in (0, 1], got {momentum}."
            logging.error(msg)
            raise ValueError(msg)
        if eps < 0:
            msg = f"Batch norm eps cannot be negative, got {eps}."
            logging.error(msg)
            raise ValueError(msg)

        self.w = w
        self.b = b
        self.running_mean = running_mean
        self.running_var = running_var
        self.momentum = float(momentum)
        self.eps = float(eps)

    @property
    def features(self) -> int:
        """Returns the number of normalized features f."""
        return self.w.shape[0]

    def update_running(self, mean: np.ndarray, var: np.ndarray) -> None:
        """running <- (1 - momentum) * running + momentum * batch, in place."""
        m = self.momentum
        self.running_mean[...] = (1.0 - m) * self.running_mean + m * mean
        self.running_var[...] = (1.0 - m) * self.running_var + m * var


class BatchNormCache(NamedTuple):
    """
    Normalized input (n_eff x f), per-feature sigma and the original input
    shape (to fold image data back).
    """

    a_bar: np.ndarray
    sigma: np.ndarray
    input_shape: tuple[int, ...]


def _as_feature_matrix(a: np.ndarray, f: int) -> np.ndarray:
    if a.ndim == 4:
        m = f2d_t(a)
    elif a.ndim == 2:
        m = a
    else:
        msg = f"Batch norm expects a rank 2 or rank 4 array, got shape {a.shape}."
        logging.error(msg)
        raise ShapeError(msg)
    if m.shape[1] != f:
        msg = f"Batch norm over {f} features received an input of shape {a.shape}."
        logging.error(msg)
        raise ShapeError(msg)
    return m


def _restore_shape(m: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if len(shape) == 4:
        n, d, r, _ = shape
        return f4d_t(m, n=n, d=d, r=r)
    return m


def batchnorm_forward(
    a: np.ndarray, state: BatchNormState, mode: str = TRAIN
) -> tuple[np.ndarray, BatchNormCache | None]:
    """
    Normalizes 'a' feature-wise and applies the affine map A_bar diag(w) + b.

    In train mode the batch statistics are used and the running statistics
    are updated; in infer mode the running statistics are used and no cache
    is produced.

    Parameters
    ----------
    a: np.ndarray
        n_eff x f Matrix or n x f x r x r Tensor4.
    state: BatchNormState
    mode: str
        'train' or 'infer'.

    Returns
    -------
    tuple[np.ndarray, BatchNormCache | None]
        Output (shape of 'a') and the cache (None in infer mode).

    Raises
    ------
    BatchSizeError
        If n_eff < 2 in train mode.
    """
    assert_valid_mode(mode)
    x = _as_feature_matrix(a, state.features)
    n_eff = x.shape[0]

    if mode == INFER:
        sigma = np.sqrt(state.running_var + state.eps)
        a_bar = (x - state.running_mean) / sigma
        out = a_bar * state.w + state.b
        return _restore_shape(out, a.shape), None

    if n_eff < 2:
        msg = (
            f"Batch statistics need at least 2 rows per feature, got n_eff={n_eff}."
        )
        logging.error(msg)
        raise BatchSizeError(msg)
    mean = np.mean(x, axis=0)
    var = np.mean((x - mean) ** 2, axis=0)
    sigma = np.sqrt(var + state.eps)
    a_bar = (x - mean) / sigma
    out = a_bar * state.w + state.b
    state.update_running(mean, var)
    return _restore_shape(out, a.shape), BatchNormCache(a_bar, sigma, a.shape)


def batchnorm_backward(
    delta: np.ndarray, cache: BatchNormCache, state: BatchNormState
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Backward rule of batch normalization.

    With dy the upstream error viewed as n_eff x f:
    dW = diag(A_bar^t dy), dB = sum of dy over rows and
    delta_in = (w / sigma) / n_eff * (n_eff dy - dB - A_bar dW).

    Raises
    ------
    LayerUsageError
        Without a train-mode cache, or when 'delta' does not match it.
    """
    if cache is None:
        msg = "batchnorm_backward: no train-mode cache (infer-mode forward?)."
        logging.error(msg)
        raise LayerUsageError(msg)
    if delta.shape != tuple(cache.input_shape):
        msg = (
            f"batchnorm_backward: error of shape {delta.shape} does not match the "
            f"cached input shape {tuple(cache.input_shape)}."
        )
        logging.error(msg)
        raise LayerUsageError(msg)

    dy = _as_feature_matrix(delta, state.features)
    n_eff = dy.shape[0]
    d_w = np.sum(cache.a_bar * dy, axis=0)
    d_b = np.sum(dy, axis=0)
    scale = state.w / cache.sigma / n_eff
    dx = scale * (n_eff * dy - d_b - cache.a_bar * d_w)
    return _restore_shape(dx, delta.shape), d_w, d_b


class BatchNorm(Layer):
    """
    Batch normalization over 'features' features (the depth for image data).
    """

    kind = "batchnorm"

    def __init__(
        self,
        features: int,
        momentum: float = DEFAULT_MOMENTUM,
        eps: float = DEFAULT_EPS,
        index: int = None,
    ) -> None:
        super().__init__(index)
        self._w = ParamTensor(self.param_name("w"), np.ones(features))
        self._b = ParamTensor(self.param_name("b"), np.zeros(features))
        self._params = [self._w, self._b]
        # w and b share memory with the ParamTensors, updates stay visible
        self._state = BatchNormState(
            self._w.value, self._b.value, momentum=momentum, eps=eps
        )

    @property
    def w(self) -> ParamTensor:
        return self._w

    @property
    def b(self) -> ParamTensor:
        return self._b

    @property
    def state(self) -> BatchNormState:
        return self._state

    @property
    def features(self) -> int:
        return self._state.features

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        if len(input_shape) not in (1, 3) or input_shape[0] != self.features:
            raise self.shape_error(
                f"normalizes {self.features} features, got per-sample shape "
                f"{tuple(input_shape)}."
            )
        return tuple(input_shape)

    def _state_names(self) -> tuple[str, str]:
        suffix = "" if self.index is None else str(self.index)
        return f"running_mean{suffix}", f"running_var{suffix}"

    def state_tensors(self) -> dict[str, np.ndarray]:
        mean_name, var_name = self._state_names()
        return {
            mean_name: self._state.running_mean,
            var_name: self._state.running_var,
        }

    def load_state_tensor(self, name: str, value: np.ndarray) -> None:
        current = self.state_tensors()
        if name not in current:
            super().load_state_tensor(name, value)
        value = np.asarray(value, dtype=np.float64)
        if value.shape != current[name].shape:
            raise self.shape_error(
                f"state tensor '{name}' has shape {current[name].shape}, "
                f"got {value.shape}."
            )
        current[name][...] = value

    def _forward(self, a, mode):
        return batchnorm_forward(a, self._state, mode)

    def _backward(self, delta, cache):
        delta_in, d_w, d_b = batchnorm_backward(delta, cache, self._state)
        self._w.set_grad(d_w)
        self._b.set_grad(d_b)
        return delta_in
