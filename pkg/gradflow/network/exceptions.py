"""
Custom exception classes raised by the network package.

Hierarchy
---------
Exception
 └── NetworkError
      ├── NetworkShapeError
      └── ArchitectureError (also a ConfigError)
"""

# local imports
from gradflow.utils.exceptions import ConfigError


class NetworkError(Exception):
    """
    Base exception for errors raised while building or running a network.
    """
    pass


class NetworkShapeError(NetworkError):
    """
    Raised when the data flowing through a network has the wrong shape. The
    message names the index of the offending layer.
    """

    def __init__(self, msg: str, layer_index: int = None) -> None:
        super().__init__(msg)
        self.layer_index = layer_index


class ArchitectureError(NetworkError, ConfigError):
    """
    Raised when an architecture description cannot be parsed or describes a
    network that cannot be built (unknown layer kind, missing hyperparameter,
    incompatible shapes, invalid shortcut).
    """
    pass
