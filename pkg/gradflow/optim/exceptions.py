"""
Custom exception classes raised by the optim package.
"""

# local imports
from gradflow.utils.exceptions import ConfigError


class TrainingError(Exception):
    """
    Raised when a training step fails. Carries the epoch and batch index of
    the failing step; the original error is chained as the cause.
    """

    def __init__(self, msg: str, epoch: int = None, batch: int = None) -> None:
        super().__init__(msg)
        self.epoch = epoch
        self.batch = batch


class TrainConfigError(ConfigError):
    """
    Raised when training hyperparameters are invalid.
    """
    pass


class EvaluationError(Exception):
    """
    Raised when a network cannot be evaluated, e.g. on an empty dataset.
    """
    pass
