"""
Command line run configuration and its validation.
"""

# standard library imports
import logging
import os

# current package imports
from .exceptions import RunConfigError

# local imports
from gradflow.gradcheck.checker import DEFAULT_TOLERANCE, LAYER_KINDS
from gradflow.network.architecture import (
    Architecture,
    load_architecture,
    reference_architecture,
)
from gradflow.optim.config import (
    DEFAULT_TRAIN_CONFIG,
    TrainConfig,
    TrainConfigManager,
)
from gradflow.utils.config_manager import ConfigManager

COMMANDS = ("train", "eval", "gradcheck", "inspect")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
GRADCHECK_TARGETS = LAYER_KINDS + ("network",)

DEFAULT_RUN_CONFIG = {
    "command": None,
    "data_dir": None,
    "config": None,
    "epochs": DEFAULT_TRAIN_CONFIG["epochs"],
    "batch_size": DEFAULT_TRAIN_CONFIG["batch_size"],
    "lr": DEFAULT_TRAIN_CONFIG["learning_rate"],
    "seed": DEFAULT_TRAIN_CONFIG["seed"],
    "shuffle": DEFAULT_TRAIN_CONFIG["shuffle"],
    "out": None,
    "checkpoint": None,
    "metrics": None,
    "layer": None,
    "tolerance": DEFAULT_TOLERANCE,
    "synthetic": False,
    "train_limit": None,
    "test_limit": None,
    "report": None,
    "log_level": "WARNING",
}


class RunConfigManager(ConfigManager):
    """
    Validates the options of one command line invocation.
    """

    def impute_default_config(self, config: dict) -> dict:
        filled = dict(DEFAULT_RUN_CONFIG)
        filled.update(
            {key: value for key, value in config.items() if value is not None}
        )
        return filled

    def check_valid_config(self, config: dict) -> str | None:
        msg = self.check_keys(config, list(DEFAULT_RUN_CONFIG))
        if msg:
            return msg
        config = self.impute_default_config(config)

        command = config["command"]
        if command not in COMMANDS:
            return f"Unknown command '{command}'. Valid commands: {list(COMMANDS)}."
        if config["log_level"] not in LOG_LEVELS:
            return (
                f"Unknown log level '{config['log_level']}'. Valid levels: "
                f"{list(LOG_LEVELS)}."
            )

        msg = TrainConfigManager().check_valid_config(self.train_config_dict(config))
        if msg:
            return msg

        for key in ("train_limit", "test_limit"):
            if config[key] is not None:
                msg = self.check_positive_int(config[key], key)
                if msg:
                    return msg

        tolerance = config["tolerance"]
        msg = self._type_checker.check_real(tolerance, "tolerance")
        if msg:
            return msg
        if tolerance <= 0:
            return f"'tolerance' must be positive, got {tolerance}."
        if config["layer"] is not None and config["layer"] not in GRADCHECK_TARGETS:
            return (
                f"Unknown gradient check target '{config['layer']}'. Valid "
                f"targets: {list(GRADCHECK_TARGETS)}."
            )

        if command == "train" and not config["out"]:
            return "The 'train' command needs an output checkpoint path (--out)."
        if command == "eval" and not config["checkpoint"]:
            return "The 'eval' command needs a checkpoint path (--checkpoint)."
        return None

    def train_config_dict(self, config: dict) -> dict:
        """Maps the run options onto TrainConfig keyword arguments."""
        return {
            "learning_rate": config["lr"],
            "batch_size": config["batch_size"],
            "epochs": config["epochs"],
            "seed": config["seed"],
            "shuffle": config["shuffle"],
        }

    def error_type(self) -> type[RunConfigError]:
        return RunConfigError


class RunConfig:
    """
    Validated options of one command line invocation.

    Attributes
    ----------
    command : str
        One of 'train', 'eval', 'gradcheck' or 'inspect'.
    data_dir : str | None
        Directory of the MNIST IDX files; GRADFLOW_DATA_DIR if None.
    config : str | None
        Architecture file; the reference network if None.
    epochs, batch_size, lr, seed, shuffle
        Training hyperparameters, see TrainConfig.
    out : str | None
        Checkpoint written by 'train'.
    checkpoint : str | None
        Checkpoint read by 'eval'.
    metrics : str | None
        Metrics CSV written by 'train'; '<out stem>_metrics.csv' if None.
    layer : str | None
        Restricts 'gradcheck' to one layer kind or to 'network'.
    tolerance : float
    synthetic : bool
        Use the procedurally drawn digits instead of MNIST files.
    train_limit, test_limit : int | None
        Keep only the first samples of a split.
    report : str | None
        JSON report written by 'gradcheck'.
    log_level : str
    """

    def __init__(self, **config) -> None:
        manager = RunConfigManager()
        manager.assert_valid_config(config)
        config = manager.impute_default_config(config)
        self._train_config = TrainConfig(**manager.train_config_dict(config))

        self._command = config["command"]
        self._data_dir = config["data_dir"]
        self._config = config["config"]
        self._epochs = config["epochs"]
        self._batch_size = config["batch_size"]
        self._lr = config["lr"]
        self._seed = config["seed"]
        self._shuffle = config["shuffle"]
        self._out = config["out"]
        self._checkpoint = config["checkpoint"]
        self._metrics = config["metrics"]
        self._layer = config["layer"]
        self._tolerance = config["tolerance"]
        self._synthetic = config["synthetic"]
        self._train_limit = config["train_limit"]
        self._test_limit = config["test_limit"]
        self._report = config["report"]
        self._log_level = config["log_level"]

    @property
    def command(self) -> str:
        return self._command

    @property
    def data_dir(self) -> str | None:
        return self._data_dir

    @property
    def config(self) -> str | None:
        return self._config

    @property
    def epochs(self) -> int:
        return self._epochs

    @property
    def batch_size(self) -> int:
        return self._batch_size

    @property
    def lr(self) -> float:
        return self._lr

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def shuffle(self) -> bool:
        return self._shuffle

    @property
    def out(self) -> str | None:
        return self._out

    @property
    def checkpoint(self) -> str | None:
        return self._checkpoint

    @property
    def metrics(self) -> str | None:
        return self._metrics

    @property
    def layer(self) -> str | None:
        return self._layer

    @property
    def tolerance(self) -> float:
        return self._tolerance

    @property
    def synthetic(self) -> bool:
        return self._synthetic

    @property
    def train_limit(self) -> int | None:
        return self._train_limit

    @property
    def test_limit(self) -> int | None:
        return self._test_limit

    @property
    def report(self) -> str | None:
        return self._report

    @property
    def log_level(self) -> str:
        return self._log_level

    def train_config(self) -> TrainConfig:
        """Returns the training hyperparameters of this run."""
        return self._train_config

    def metrics_path(self) -> str:
        """Returns the metrics CSV path, derived from 'out' if not given."""
        if self._metrics:
            return self._metrics
        stem, _ = os.path.splitext(self._out)
        return f"{stem}_metrics.csv"

    def architecture(self) -> Architecture:
        """Returns the architecture named by 'config', or the reference one."""
        if self._config is None:
            return reference_architecture()
        logging.info("Loading architecture from '{}'.".format(self._config))
        return load_architecture(self._config)

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in DEFAULT_RUN_CONFIG}

    def __str__(self) -> str:
        return "RunConfig({})".format(
            ", ".join(f"{key}={value}" for key, value in self.to_dict().items())
        )
