"""
Type checks for configuration values: learning rates, tolerances, batch-norm
hyperparameters and file paths.
"""

# standard library imports
import logging
import math


class TypeChecker:
    """
    check_*/assert_* pairs for python values. check_* returns an error message
    (None when valid), assert_* logs it and raises TypeError.
    """

    def check_type(self, data, label: str, expected_types: tuple) -> str | None:
        """
        Returns an error message if 'data' is not an instance of one of
        'expected_types'.

        Parameters
        ----------
        data : any
        label : str
            Name used in the message.
        expected_types : tuple
        """
        if not isinstance(data, expected_types):
            return (
                f"'{label}' must be of type {expected_types}, "
                f"but got type {type(data)} with value '{data}'."
            )
        return None

    def assert_type(self, data, label: str, expected_types: tuple) -> None:
        """Raises TypeError if 'data' is not one of 'expected_types'."""
        msg = self.check_type(data, label, expected_types)
        if msg:
            logging.error(msg)
            raise TypeError(msg)

    def check_real(self, data, label: str) -> str | None:
        """
        Returns an error message unless 'data' is a finite int or float. Bools
        are rejected even though they subclass int.
        """
        if isinstance(data, bool):
            return f"'{label}' must be a number, got the bool {data}."
        msg = self.check_type(data, label, (float, int))
        if msg:
            return msg
        if not math.isfinite(data):
            return f"'{label}' must be finite, got {data}."
        return None
