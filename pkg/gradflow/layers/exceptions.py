"""
Custom exception classes raised by the layers package.

Hierarchy
---------
Exception
 └── LayerError
      ├── LayerUsageError
      ├── BatchSizeError
      ├── LabelError
      └── NumericError (also an ArithmeticError)
"""


class LayerError(Exception):
    """
    Base exception for failures inside a layer's forward or backward rule.
    """
    pass


class LayerUsageError(LayerError):
    """
    Raised when a layer is driven out of its forward/backward cycle, e.g. a
    backward call without a cached train-mode forward, a stale cache whose
    shapes disagree with the upstream error, or a backward in infer mode.
    """
    pass


class BatchSizeError(LayerError):
    """
    Raised when batch statistics are requested from fewer than two samples.
    """
    pass


class LabelError(LayerError, ValueError):
    """
    Raised when ground-truth rows are not one-hot encoded.
    """
    pass


class NumericError(LayerError, ArithmeticError):
    """
    Raised when non-finite values (nan, inf) appear where finite values are
    required.
    """
    pass
