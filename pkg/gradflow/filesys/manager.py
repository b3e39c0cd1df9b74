"""
Checks run before a checkpoint, a metrics log or a gradient-check report is
written.
"""

# standard library imports
import logging
import os

# current package imports
from .dir import Dir
from .exceptions import FileSystemObjectError
from .file import File


class FileSystemManager:
    """
    Validates output paths so that a long training run does not fail at its
    first write.
    """

    def check_valid_output_path(self, path: str) -> str | None:
        """
        Checks that a file can be created or replaced at 'path': its parent
        directory must exist and 'path' itself must not be a directory.

        Parameters
        ----------
        path : str
            Destination of an output file. A bare filename refers to the
            current working directory.

        Returns
        -------
        str | None
            None if 'path' is writable, otherwise an error message.
        """
        if os.path.isdir(path):
            return f"Output path '{path}' is a directory."
        msg = Dir(File(path).get_parent_dir_path()).check_exists()
        if msg is not None:
            return f"Cannot write '{path}'. {msg}"
        return None

    def is_valid_output_path(self, path: str) -> bool:
        """Returns True if check_valid_output_path finds no problem."""
        return self.check_valid_output_path(path) is None

    def assert_valid_output_path(self, path: str) -> None:
        """
        Raises FileSystemObjectError if no file can be written at 'path'.
        """
        msg = self.check_valid_output_path(path)
        if msg is not None:
            logging.error(msg)
            raise FileSystemObjectError(msg)
