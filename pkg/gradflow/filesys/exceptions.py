"""
Errors raised while reading MNIST files or writing run outputs.

FileSystemObjectError (an OSError, so exit code 4)
├── FileError
│   └── JsonFileError
└── DirError
"""


class FileSystemObjectError(OSError):
    """A path is missing, has the wrong kind or cannot be written."""
    pass


class FileError(FileSystemObjectError):
    """A regular file is missing or unreadable, e.g. a checkpoint."""
    pass


class JsonFileError(FileError):
    """A report path does not end in '.json' or holds invalid JSON."""
    pass


class DirError(FileSystemObjectError):
    """A directory is missing, e.g. the MNIST data directory."""
    pass
