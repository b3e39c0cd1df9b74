"""
Exceptions shared by every gradflow package.
"""


class ConfigError(Exception):
    """
    Base class of configuration errors: training hyperparameters, architecture
    files and command line options.
    """
    pass


class EnvironmentVariableNotSetError(ConfigError):
    """
    Raised when no data directory is given and GRADFLOW_DATA_DIR is unset.
    """
    pass
