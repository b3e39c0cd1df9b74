"""
Paths read and written by gradflow: IDX files, checkpoints, metrics logs and
gradient-check reports.
"""

# standard library imports
import logging
import os

# current package imports
from .exceptions import FileSystemObjectError

# local imports
from gradflow.utils.type_checker import TypeChecker


class FileSystemObject:
    """
    A path in the local file system. Subclasses narrow what counts as existing
    and which error their assertions raise.
    """

    def __init__(self, path: str) -> None:
        self._type_checker = TypeChecker()
        self._type_checker.assert_type(path, "path", (str,))
        self._path = path

    @property
    def path(self) -> str:
        return self._path

    def get_type(self) -> str:
        """Name of the object kind used in error messages."""
        return "Path"

    def error_type(self) -> type[FileSystemObjectError]:
        return FileSystemObjectError

    def get_parent_dir_path(self) -> str:
        """
        Absolute path of the enclosing directory. A bare filename lives in the
        current working directory.
        """
        return os.path.dirname(os.path.abspath(self._path))

    def check_exists(self) -> str | None:
        """
        Returns
        -------
        str | None
            None if something exists at the path, otherwise an error message.
        """
        if os.path.exists(self._path):
            return None
        return f"{self.get_type()} '{self._path}' does not exist."

    def exists(self) -> bool:
        return self.check_exists() is None

    def assert_exists(self) -> None:
        """Raises error_type() if check_exists reports a problem."""
        msg = self.check_exists()
        if msg is not None:
            logging.error(msg)
            raise self.error_type()(msg)
