"""
Unit tests for configuration validation, seeding and exit code mapping.
"""

# local imports
from gradflow.cli.config import DEFAULT_RUN_CONFIG, RunConfig, RunConfigManager
from gradflow.cli.exceptions import (
    CheckpointChecksumError,
    CheckpointError,
    RunConfigError,
)
from gradflow.filesys.exceptions import FileError
from gradflow.gradcheck.exceptions import GradCheckError
from gradflow.layers.exceptions import LabelError, NumericError
from gradflow.mnist.exceptions import DatasetError, IdxParseError
from gradflow.network.exceptions import ArchitectureError
from gradflow.optim.exceptions import EvaluationError, TrainingError
from gradflow.utils.config_manager import ConfigManager
from gradflow.utils.exception_handler import ExceptionHandler
from gradflow.utils.exceptions import ConfigError, EnvironmentVariableNotSetError
from gradflow.utils.seeding import check_valid_seed, make_rng
from gradflow.utils.type_checker import TypeChecker

# 3rd party imports
import pytest
from numpy.testing import assert_array_equal


class PositiveConfigManager(ConfigManager):
    def check_valid_config(self, config: dict) -> str | None:
        return self.check_positive_int(config.get("n"), "n")


def test_config_manager_triad():
    manager = PositiveConfigManager()
    assert manager.check_valid_config({"n": 3}) is None
    assert manager.is_valid_config({"n": 3})
    assert not manager.is_valid_config({"n": 0})
    assert not manager.is_valid_config({"n": True})
    with pytest.raises(ConfigError, match="'n'"):
        manager.assert_valid_config({"n": 1.5})


def test_check_non_negative_int():
    manager = PositiveConfigManager()
    assert manager.check_non_negative_int(0, "p") is None
    assert manager.check_non_negative_int(-1, "p") is not None
    assert manager.check_non_negative_int("1", "p") is not None


def test_type_checker():
    checker = TypeChecker()
    assert checker.check_type(1.0, "lr", (float, int)) is None
    assert "lr" in checker.check_type("1", "lr", (float, int))
    with pytest.raises(TypeError):
        checker.assert_type(None, "path", (str,))


@pytest.mark.parametrize(
    "value, valid",
    [(0, True), (1e-6, True), (-2.5, True), (True, False), ("1", False)]
    + [(float("nan"), False), (float("inf"), False)],
)
def test_check_real(value, valid):
    assert (TypeChecker().check_real(value, "lr") is None) == valid


def test_check_keys():
    manager = PositiveConfigManager()
    assert manager.check_keys({"k": 1}, ["k", "s"], ["k"]) is None
    assert "'q'" in manager.check_keys({"k": 1, "q": 2}, ["k", "s", "p"])
    assert "'out'" in manager.check_keys({"k": 1}, ["k", "out"], ["k", "out"])


@pytest.mark.parametrize(
    "seed, valid",
    [(0, True), (2**64 - 1, True), (2**64, False), (-1, False), (1.0, False)],
)
def test_check_valid_seed(seed, valid):
    assert (check_valid_seed(seed) is None) == valid


def test_make_rng_streams():
    assert_array_equal(make_rng(3).random(4), make_rng(3).random(4))
    assert not (make_rng(3, 0).random(4) == make_rng(3, 1).random(4)).all()


def test_run_config_defaults(tmp_path):
    cfg = RunConfig(command="train", out=str(tmp_path / "ckpt.bin"))
    assert cfg.epochs == DEFAULT_RUN_CONFIG["epochs"]
    assert cfg.log_level == "WARNING"
    assert cfg.synthetic is False
    assert cfg.train_config().learning_rate == 0.01
    assert cfg.train_config().shuffle
    assert cfg.shuffle is True
    assert cfg.metrics_path() == str(tmp_path / "ckpt_metrics.csv")
    assert cfg.architecture().fingerprint() == RunConfig(
        command="inspect"
    ).architecture().fingerprint()
    assert "command=train" in str(cfg)


def test_run_config_explicit_metrics_path():
    cfg = RunConfig(command="train", out="ckpt.bin", metrics="m.csv")
    assert cfg.metrics_path() == "m.csv"


def test_run_config_without_shuffle():
    cfg = RunConfig(command="train", out="ckpt.bin", shuffle=False)
    assert cfg.shuffle is False
    assert cfg.train_config().shuffle is False
    assert cfg.to_dict()["shuffle"] is False
    with pytest.raises(AttributeError):
        cfg.shuffle = True


@pytest.mark.parametrize(
    "config",
    [
        {"command": "predict"},
        {"command": "inspect", "log_level": "LOUD"},
        {"command": "inspect", "verbose": True},
        {"command": "train"},
        {"command": "eval"},
        {"command": "train", "out": "c.bin", "lr": -1.0},
        {"command": "train", "out": "c.bin", "batch_size": 0},
        {"command": "eval", "checkpoint": "c.bin", "test_limit": 0},
        {"command": "gradcheck", "tolerance": 0.0},
        {"command": "gradcheck", "tolerance": float("inf")},
        {"command": "gradcheck", "layer": "dropout"},
        {"command": "train", "out": "c.bin", "shuffle": "yes"},
    ],
)
def test_run_config_rejects(config):
    assert not RunConfigManager().is_valid_config(config)
    with pytest.raises(RunConfigError):
        RunConfig(**config)


def test_run_config_error_is_config_error():
    assert issubclass(RunConfigError, ConfigError)


@pytest.mark.parametrize(
    "exception, code",
    [
        (NumericError("nan"), ExceptionHandler.NUMERIC_ERROR),
        (GradCheckError("fail"), ExceptionHandler.GRADCHECK_FAILED),
        (CheckpointError("bad", offset=3), ExceptionHandler.IO_ERROR),
        (CheckpointChecksumError("crc"), ExceptionHandler.IO_ERROR),
        (IdxParseError("bad"), ExceptionHandler.IO_ERROR),
        (FileError("missing"), ExceptionHandler.IO_ERROR),
        (RunConfigError("bad"), ExceptionHandler.INVALID_INPUT_DATA),
        (ArchitectureError("bad"), ExceptionHandler.INVALID_INPUT_DATA),
        (EnvironmentVariableNotSetError("x"), ExceptionHandler.INVALID_INPUT_DATA),
        (DatasetError("x"), ExceptionHandler.INVALID_INPUT_DATA),
        (EvaluationError("x"), ExceptionHandler.INVALID_INPUT_DATA),
        (LabelError("x"), ExceptionHandler.INVALID_INPUT_DATA),
        (ValueError("x"), ExceptionHandler.INVALID_INPUT_DATA),
        (RuntimeError("x"), ExceptionHandler.OTHER),
    ],
)
def test_exit_codes(exception, code):
    assert ExceptionHandler().get_status_code(exception) == code


def test_training_error_maps_by_cause():
    handler = ExceptionHandler()
    try:
        try:
            raise NumericError("non-finite logits")
        except NumericError as e:
            raise TrainingError("step failed", epoch=0, batch=2) from e
    except TrainingError as e:
        assert handler.get_status_code(e) == ExceptionHandler.NUMERIC_ERROR
        lines = handler.get_stack_trace_info(e)
    assert lines[0].startswith("TrainingError in test_training_error_maps_by_cause")
    assert lines[-1].startswith("NumericError")
    assert "non-finite logits" in lines[-1]
    assert handler.get_status_code(TrainingError("x")) == ExceptionHandler.OTHER


def test_checkpoint_error_offset_in_message():
    error = CheckpointError("truncated", offset=12)
    assert error.offset == 12
    assert str(error) == "truncated (byte offset 12)"
