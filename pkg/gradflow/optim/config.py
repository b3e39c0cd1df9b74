"""
Training hyperparameters and their validation.
"""

# current package imports
from .exceptions import TrainConfigError

# local imports
from gradflow.utils.config_manager import ConfigManager
from gradflow.utils.seeding import check_valid_seed

DEFAULT_TRAIN_CONFIG = {
    "learning_rate": 0.01,
    "batch_size": 32,
    "epochs": 5,
    "seed": 0,
    "shuffle": True,
}


class TrainConfigManager(ConfigManager):
    """
    Validates training configuration dictionaries.
    """

    def impute_default_config(self, config: dict) -> dict:
        """
        Fills missing keys with the defaults: learning rate 0.01, batch size 32,
        5 epochs, seed 0, shuffling on.
        """
        filled = dict(DEFAULT_TRAIN_CONFIG)
        filled.update(
            {key: value for key, value in config.items() if value is not None}
        )
        return filled

    def check_valid_config(self, config: dict) -> str | None:
        msg = self.check_keys(config, list(DEFAULT_TRAIN_CONFIG))
        if msg:
            return msg
        config = self.impute_default_config(config)

        lr = config["learning_rate"]
        msg = self._type_checker.check_real(lr, "learning_rate")
        if msg:
            return msg
        if lr < 0:
            return f"'learning_rate' cannot be negative, got {lr}."

        msg = self.check_positive_int(config["batch_size"], "batch_size")
        if msg:
            return msg
        msg = self.check_positive_int(config["epochs"], "epochs")
        if msg:
            return msg
        msg = check_valid_seed(config["seed"])
        if msg:
            return msg
        return self._type_checker.check_type(config["shuffle"], "shuffle", (bool,))

    def error_type(self) -> type[TrainConfigError]:
        return TrainConfigError


class TrainConfig:
    """
    Validated training hyperparameters.

    Attributes
    ----------
    learning_rate : float
        SGD step size lambda >= 0.
    batch_size : int
        Minibatch size n >= 1.
    epochs : int
        Number of passes over the training set.
    seed : int
        64-bit seed of the shuffling streams.
    shuffle : bool
        Whether each epoch visits the samples in a fresh random order.
    """

    def __init__(self, **config) -> None:
        manager = TrainConfigManager()
        manager.assert_valid_config(config)
        config = manager.impute_default_config(config)
        self._learning_rate = float(config["learning_rate"])
        self._batch_size = config["batch_size"]
        self._epochs = config["epochs"]
        self._seed = config["seed"]
        self._shuffle = config["shuffle"]

    @property
    def learning_rate(self) -> float:
        return self._learning_rate

    @property
    def batch_size(self) -> int:
        return self._batch_size

    @property
    def epochs(self) -> int:
        return self._epochs

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def shuffle(self) -> bool:
        return self._shuffle

    def to_dict(self) -> dict:
        return {
            "learning_rate": self._learning_rate,
            "batch_size": self._batch_size,
            "epochs": self._epochs,
            "seed": self._seed,
            "shuffle": self._shuffle,
        }

    def __str__(self) -> str:
        return "TrainConfig({})".format(
            ", ".join(f"{key}={value}" for key, value in self.to_dict().items())
        )
