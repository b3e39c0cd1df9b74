"""
Exit codes of the gradflow command and the traceback lines logged on failure.
"""

# standard library imports
import traceback

# current package imports
from .exceptions import ConfigError

# local imports
from gradflow.cli.exceptions import CheckpointError
from gradflow.filesys.exceptions import FileSystemObjectError
from gradflow.gradcheck.exceptions import GradCheckError
from gradflow.geometry.exceptions import GeometryError
from gradflow.layers.exceptions import LayerError, NumericError
from gradflow.mnist.exceptions import DatasetError, IdxParseError
from gradflow.network.exceptions import NetworkError
from gradflow.optim.exceptions import EvaluationError, TrainingError
from gradflow.tensor.exceptions import TensorError


class ExceptionHandler:
    """
    Maps the package exceptions onto exit codes. A TrainingError takes the code
    of the exception that caused it.
    """

    SUCCESS = 0
    INVALID_INPUT_DATA = 1
    NUMERIC_ERROR = 2
    GRADCHECK_FAILED = 3
    IO_ERROR = 4
    OTHER = 5

    def get_status_code(self, exception: Exception) -> int:
        """
        Returns the exit code for 'exception'. Numeric failures are checked
        before LayerError, which NumericError subclasses.
        """
        if isinstance(exception, TrainingError) and exception.__cause__ is not None:
            return self.get_status_code(exception.__cause__)
        if isinstance(exception, NumericError):
            return self.NUMERIC_ERROR
        if isinstance(exception, GradCheckError):
            return self.GRADCHECK_FAILED
        if isinstance(
            exception,
            (CheckpointError, IdxParseError, FileSystemObjectError, OSError),
        ):
            return self.IO_ERROR
        if isinstance(
            exception,
            (
                ConfigError,
                DatasetError,
                NetworkError,
                EvaluationError,
                LayerError,
                TensorError,
                GeometryError,
            ),
        ):
            return self.INVALID_INPUT_DATA
        if isinstance(exception, (ValueError, TypeError)):
            return self.INVALID_INPUT_DATA
        return self.OTHER

    def get_stack_trace_info(self, exception: BaseException) -> list[str]:
        """
        One line per traceback frame of 'exception' and of every exception in
        its __cause__ chain, outermost first. Used for the debug log of a
        failed command.

        Returns
        -------
        list[str]
            Lines of the form '<type> in <function> (<file>:<line>): <message>'.
        """
        lines = []
        current = exception
        while current is not None:
            for frame in traceback.extract_tb(current.__traceback__):
                lines.append(
                    f"{type(current).__name__} in {frame.name} "
                    f"({frame.filename}:{frame.lineno}): {current}"
                )
            current = current.__cause__
        return lines
