"""
Directories, in practice the one holding the MNIST IDX files.
"""

# standard library imports
import os

# current package imports
from .exceptions import DirError
from .file import File
from .object import FileSystemObject


class Dir(FileSystemObject):
    """A directory searched for input files."""

    def get_type(self) -> str:
        return "Directory"

    def error_type(self) -> type[DirError]:
        return DirError

    def check_exists(self) -> str | None:
        msg = super().check_exists()
        if msg is None and not os.path.isdir(self._path):
            msg = f"'{self._path}' is a file, expected a directory."
        return msg

    def find_first_file(self, filenames: list[str]) -> File | None:
        """
        Returns the first of 'filenames' present in the directory, so that a
        raw IDX file wins over its gzipped copy when both are listed that way.

        Parameters
        ----------
        filenames : list[str]
            Candidate names, most preferred first.

        Raises
        ------
        DirError
            If the directory itself does not exist.
        """
        self.assert_exists()
        for filename in filenames:
            candidate = File(os.path.join(self._path, filename))
            if candidate.exists():
                return candidate
        return None
