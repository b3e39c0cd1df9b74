"""
Custom exceptions raised by the tensor package.
"""


class TensorError(ValueError):
    """
    Base exception for invalid tensor values or operations.
    """
    pass


class ShapeError(TensorError):
    """
    Raised when the shapes of the operands of a tensor operation are incompatible.
    The message names every offending shape.
    """
    pass
