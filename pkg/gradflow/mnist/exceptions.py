"""
Custom exception classes raised by the mnist package.
"""


class IdxParseError(Exception):
    """
    Raised when an IDX file cannot be parsed. 'offset' is the byte position
    (in the decompressed stream) where parsing failed.
    """

    def __init__(self, msg: str, offset: int = None) -> None:
        if offset is not None:
            msg = f"{msg} (byte offset {offset})"
        super().__init__(msg)
        self.offset = offset


class DatasetError(Exception):
    """
    Raised when a dataset is inconsistent (image and label counts differ,
    labels out of range, empty selections) or cannot be located.
    """
    pass
