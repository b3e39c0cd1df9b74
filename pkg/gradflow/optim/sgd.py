"""
Plain stochastic gradient descent: P <- P - lambda * dL/dP.
"""

# standard library imports
import logging

# local imports
from gradflow.layers.exceptions import NumericError
from gradflow.layers.param import ParamTensor

# 3rd party imports
import numpy as np


def sgd_step(
    params: list[ParamTensor],
    grads: list[np.ndarray] | None,
    learning_rate: float,
) -> None:
    """
    Updates every parameter in place.

    Parameters
    ----------
    params: list[ParamTensor]
        Parameters to update.
    grads: list[np.ndarray] | None
        Gradients aligned with 'params'. None takes the gradients that the
        last backward pass stored in the ParamTensors.
    learning_rate: float
        Step size lambda.

    Raises
    ------
    NumericError
        If any gradient holds non-finite values. No parameter is modified.
    """
    if grads is None:
        grads = [param.grad for param in params]
    if len(grads) != len(params):
        msg = f"Got {len(grads)} gradients for {len(params)} parameters."
        logging.error(msg)
        raise ValueError(msg)
    for param, grad in zip(params, grads):
        if not np.all(np.isfinite(grad)):
            msg = f"Non-finite gradient for parameter '{param.name}'; step aborted."
            logging.error(msg)
            raise NumericError(msg)
    for param, grad in zip(params, grads):
        param.value[...] -= learning_rate * grad
