"""
Custom exception classes raised by the cli package.

Hierarchy
---------
Exception
 ├── CheckpointError
 │    ├── CheckpointChecksumError
 │    └── CheckpointVersionError
 └── ConfigError
      └── RunConfigError
"""

# local imports
from gradflow.utils.exceptions import ConfigError


class CheckpointError(Exception):
    """
    Raised when a checkpoint cannot be written or parsed (bad magic, truncated
    content, inconsistent dimensions). 'offset' is the byte position where
    parsing failed, if known.
    """

    def __init__(self, msg: str, offset: int = None) -> None:
        if offset is not None:
            msg = f"{msg} (byte offset {offset})"
        super().__init__(msg)
        self.offset = offset


class CheckpointChecksumError(CheckpointError):
    """
    Raised when the trailing CRC-32 does not match the checkpoint content.
    """
    pass


class CheckpointVersionError(CheckpointError):
    """
    Raised when a checkpoint has an unsupported format version or was written
    for a different architecture (fingerprint mismatch).
    """
    pass


class RunConfigError(ConfigError):
    """
    Raised when command line options are invalid or inconsistent.
    """
    pass
