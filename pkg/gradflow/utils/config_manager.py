"""
Base class of the training, architecture and command line validators.
"""

# standard library imports
import abc
import logging

# current package imports
from .exceptions import ConfigError
from .type_checker import TypeChecker


class ConfigManager(abc.ABC):
    """
    Validates configuration dictionaries.

    Subclasses implement check_valid_config, which returns None for a valid
    dictionary and an error message otherwise, and may narrow error_type and
    fill defaults in impute_default_config.
    """

    def __init__(self) -> None:
        self._type_checker = TypeChecker()

    def impute_default_config(self, config: dict) -> dict:
        """
        Returns 'config' with missing keys set to their defaults. The base
        class has no defaults.
        """
        return config

    @abc.abstractmethod
    def check_valid_config(self, config: dict) -> str | None:
        """
        Checks a (possibly partial) configuration dictionary.

        Returns
        -------
        str | None
            None if 'config' is valid, otherwise the first problem found.
        """
        pass

    def is_valid_config(self, config: dict) -> bool:
        """Returns True if check_valid_config finds no problem."""
        return self.check_valid_config(config) is None

    def assert_valid_config(self, config: dict) -> None:
        """
        Raises error_type() with the message of check_valid_config, logging it
        first.
        """
        error_msg = self.check_valid_config(config)
        if error_msg is not None:
            logging.error(error_msg)
            raise self.error_type()(error_msg)

    def error_type(self) -> type[ConfigError]:
        """Returns the exception class raised by assert_valid_config."""
        return ConfigError

    def check_keys(
        self, config: dict, allowed: list[str], required: list[str] = ()
    ) -> str | None:
        """
        Returns an error message if 'config' holds a key outside 'allowed' or
        lacks one of 'required'.
        """
        unknown = [key for key in config if key not in allowed]
        if unknown:
            return f"Unknown keys {unknown}. Valid keys: {list(allowed)}."
        missing = [key for key in required if key not in config]
        if missing:
            return f"Missing keys {missing}."
        return None

    def check_positive_int(self, value, label: str) -> str | None:
        """Checks that 'value' is an int (bools excluded) of at least 1."""
        if isinstance(value, bool) or not isinstance(value, int):
            return f"'{label}' must be an int, got {type(value)} with value '{value}'."
        if value < 1:
            return f"'{label}' must be at least 1, got {value}."
        return None

    def check_non_negative_int(self, value, label: str) -> str | None:
        """Checks that 'value' is an int (bools excluded) of at least 0."""
        if isinstance(value, bool) or not isinstance(value, int):
            return f"'{label}' must be an int, got {type(value)} with value '{value}'."
        if value < 0:
            return f"'{label}' cannot be negative, got {value}."
        return None
