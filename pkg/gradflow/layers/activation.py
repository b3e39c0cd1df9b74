"""
Element-wise activation (ReLU) and the classifier head: softmax, cross-entropy
loss and their backward rules.

Notes
-----
- g'(0) is taken as 1 (right-sided derivative of the ReLU).
- Softmax subtracts the per-row max before exponentiation.
- Cross-entropy clamps y_pred(c_gt) to at least PROBABILITY_FLOOR before the log.
"""

# standard library imports
import logging

# current package imports
from .exceptions import LabelError, NumericError
from .layer import Layer

# local imports
from gradflow.tensor.exceptions import ShapeError
from gradflow.tensor.ops import assert_rank, assert_same_shape, feature_dot

# 3rd party imports
import numpy as np

PROBABILITY_FLOOR = 1e-12


def relu_forward(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Applies max(x, 0) element-wise to a Matrix or Tensor4.

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        The activated array and the cache (the input itself).
    """
    return np.maximum(a, 0.0), a


def relu_derivative(a: np.ndarray) -> np.ndarray:
    """
    g'(x): 1 where x >= 0, 0 elsewhere.
    """
    return (a >= 0.0).astype(np.float64)


def relu_backward(delta: np.ndarray, cache: np.ndarray) -> np.ndarray:
    """
    Delta_{i-1} = Delta_i o g'(A_{i-1}).
    """
    assert_same_shape(delta, cache, "relu_backward")
    return delta * relu_derivative(cache)


class ReLU(Layer):
    """
    Rectified linear unit applied element-wise; no trainable parameters.
    """

    kind = "relu"

    def output_shape(self, input_shape: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(input_shape)

    def _forward(self, a, mode):
        return relu_forward(a)

    def _backward(self, delta, cache):
        return relu_backward(delta, cache)


def softmax_forward(logits: np.ndarray) -> np.ndarray:
    """
    Row-wise softmax of an n x n_c Matrix of logits.

    Raises
    ------
    NumericError
        If any logit is non-finite.
    """
    assert_rank(logits, 2, "logits")
    if not np.all(np.isfinite(logits)):
        msg = "softmax_forward: logits contain non-finite values."
        logging.error(msg)
        raise NumericError(msg)
    shifted = logits - np.max(logits, axis=1, keepdims=True)
    exps = np.exp(shifted)
    return exps / np.sum(exps, axis=1, keepdims=True)


def check_one_hot(y_gt: np.ndarray) -> str | None:
    """
    Returns an error message unless every row of 'y_gt' has exactly one 1 and
    zeros elsewhere.
    """
    if y_gt.ndim != 2:
        return f"Labels must be a Matrix, got shape {y_gt.shape}."
    is_binary = np.all((y_gt == 0.0) | (y_gt == 1.0), axis=1)
    has_single_one = np.sum(y_gt == 1.0, axis=1) == 1
    bad_rows = np.flatnonzero(~(is_binary & has_single_one))
    if bad_rows.size:
        return (
            f"Label rows must be one-hot; {bad_rows.size} row(s) are not, "
            f"first offending row index {int(bad_rows[0])}."
        )
    return None


def assert_one_hot(y_gt: np.ndarray) -> None:
    """
    Raises LabelError if 'y_gt' is not one-hot encoded.
    """
    msg = check_one_hot(y_gt)
    if msg:
        logging.error(msg)
        raise LabelError(msg)


def cross_entropy_loss(
    y_pred: np.ndarray, y_gt: np.ndarray
) -> tuple[np.ndarray, float]:
    """
    Cross-entropy between one-hot ground truth and predicted distributions.

    Parameters
    ----------
    y_pred: np.ndarray
        n x n_c Matrix whose rows are probability distributions.
    y_gt: np.ndarray
        n x n_c one-hot Matrix.

    Returns
    -------
    tuple[np.ndarray, float]
        The per-sample loss vector and its sum L_batch.
    """
    assert_same_shape(y_pred, y_gt, "cross_entropy_loss")
    assert_one_hot(y_gt)
    picked = np.sum(y_pred * y_gt, axis=1)
    per_sample = -np.log(np.maximum(picked, PROBABILITY_FLOOR))
    return per_sample, float(np.sum(per_sample))


def softmax_ce_backward(y_pred: np.ndarray, y_gt: np.ndarray) -> np.ndarray:
    """
    Error at the embedding for softmax followed by cross-entropy:
    Delta = Y_pred - Y_gt.
    """
    assert_same_shape(y_pred, y_gt, "softmax_ce_backward")
    return y_pred - y_gt


def cross_entropy_backward(y_pred: np.ndarray, y_gt: np.ndarray) -> np.ndarray:
    """
    Gradient of L_batch with respect to Y_pred: -Y_gt / Y_pred (clamped).
    """
    assert_same_shape(y_pred, y_gt, "cross_entropy_backward")
    return -y_gt / np.maximum(y_pred, PROBABILITY_FLOOR)


def softmax_backward(y_pred: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """
    Softmax Jacobian-vector product applied sample by sample:
    Delta_in = Y_pred o (Delta - (Delta . Y_pred) broadcast over classes).

    Composing it with cross_entropy_backward reproduces softmax_ce_backward.
    """
    if y_pred.shape != delta.shape:
        msg = f"softmax_backward: shapes {y_pred.shape} and {delta.shape} differ."
        logging.error(msg)
        raise ShapeError(msg)
    return y_pred * (delta - feature_dot(delta, y_pred)[:, np.newaxis])
