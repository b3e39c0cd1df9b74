"""
Identity shortcut: the output of a later layer is summed with an earlier,
equally shaped activation. The backward pass hands the same error to both
branches.
"""

# local imports
from gradflow.tensor.ops import assert_same_shape

# 3rd party imports
import numpy as np


def shortcut_add(a_skip: np.ndarray, a_residual: np.ndarray) -> np.ndarray:
    """
    Element-wise sum of the bypassed activation and the residual branch.

    Raises
    ------
    ShapeError
        If the two arrays differ in shape.
    """
    assert_same_shape(a_skip, a_residual, "shortcut_add")
    return a_skip + a_residual


def shortcut_backward(delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Returns the error for the skip branch and for the residual branch, both
    equal to 'delta'.
    """
    return delta, delta
