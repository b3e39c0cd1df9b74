"""
Regular files holding bytes: IDX payloads, checkpoints and metric logs.
"""

# standard library imports
import logging
import os

# current package imports
from .exceptions import FileError
from .object import FileSystemObject


class File(FileSystemObject):
    """A regular file read and written whole."""

    def get_type(self) -> str:
        return "File"

    def error_type(self) -> type[FileError]:
        return FileError

    def get_filename(self) -> str:
        return os.path.basename(self._path)

    def get_file_extension(self) -> str | None:
        """Extension without the dot, or None for bare IDX names."""
        ext = os.path.splitext(self._path)[1]
        return ext[1:] or None

    def check_exists(self) -> str | None:
        """Like FileSystemObject.check_exists, but directories do not count."""
        msg = super().check_exists()
        if msg is None and not os.path.isfile(self._path):
            msg = f"'{self._path}' is not a regular file."
        return msg

    def read_bytes(self) -> bytes:
        """
        Returns the whole content.

        Raises
        ------
        FileError
            If the path is missing or not a regular file.
        """
        self.assert_exists()
        with open(self._path, "rb") as f:
            data = f.read()
        logging.debug("Read {} bytes from '{}'.".format(len(data), self._path))
        return data

    def write_bytes(self, data: bytes) -> None:
        """Creates the file or replaces its content with 'data'."""
        with open(self._path, "wb") as f:
            f.write(data)
        logging.debug("Wrote {} bytes to '{}'.".format(len(data), self._path))
