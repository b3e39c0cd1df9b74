"""
Unit tests for checkpoints, the metrics sink and the command line entry point.
"""

# standard library imports
import json

# local imports
from gradflow.cli.checkpoint import (
    MAGIC,
    CheckpointState,
    checkpoint_tensors,
    decode_tensors,
    encode_tensors,
    load_checkpoint,
    save_checkpoint,
)
from gradflow.cli.exceptions import (
    CheckpointChecksumError,
    CheckpointError,
    CheckpointVersionError,
)
from gradflow.cli.main import build_parser, inspect_lines, main, parse_run_config
from gradflow.cli.metrics import COLUMNS, CsvMetricsSink, read_metrics
from gradflow.filesys.exceptions import FileSystemObjectError
from gradflow.layers.layer import INFER, TRAIN
from gradflow.mnist.synthetic import synthetic_dataset
from gradflow.network.architecture import parse_architecture, reference_architecture
from gradflow.network.builder import build_from_architecture, build_reference_net
from gradflow.optim.trainer import MetricsRecord
from gradflow.utils.exception_handler import ExceptionHandler

# 3rd party imports
import numpy as np
import pytest
from numpy.testing import assert_array_equal

SMALL_ARCHITECTURE = """\
input d=1 r=28
classes n=10
conv out=2 k=5 s=1 p=0
relu
maxpool k=4 s=4 p=0
batchnorm
flatten
fc out=10
"""


@pytest.fixture
def trained_net():
    net = build_reference_net(seed=3)
    data = synthetic_dataset(samples_per_class=1, seed=3)
    # one train-mode forward moves the running statistics off their defaults
    net.forward(data.images, TRAIN)
    net.clear_caches()
    return net


@pytest.fixture
def checkpoint_path(tmp_path, trained_net):
    path = str(tmp_path / "ckpt.bin")
    state = CheckpointState(reference_architecture(), epoch=2, seed=2**40 + 5)
    save_checkpoint(path, trained_net, state)
    return path


def test_checkpoint_layout(checkpoint_path):
    with open(checkpoint_path, "rb") as f:
        data = f.read()
    assert data[:8] == MAGIC
    tensors = decode_tensors(data)
    names = list(tensors)
    assert names[:5] == [
        "meta.format_version",
        "meta.fingerprint",
        "meta.epoch",
        "meta.seed",
        "meta.architecture",
    ]
    assert names[5:7] == ["w15", "b15"]
    assert len([name for name in names if name.startswith("running_")]) == 8
    assert len(names) == 5 + 18 + 8


def test_checkpoint_roundtrip_is_bit_exact(tmp_path, checkpoint_path, trained_net):
    net, state = load_checkpoint(checkpoint_path)
    assert state.epoch == 2
    assert state.seed == 2**40 + 5
    assert state.architecture == reference_architecture()
    for a, b in zip(net.collect_params(), trained_net.collect_params()):
        assert_array_equal(a.value, b.value)
    for name, value in trained_net.state_tensors().items():
        assert_array_equal(net.state_tensors()[name], value)

    a0 = synthetic_dataset(samples_per_class=1, seed=9).images
    assert_array_equal(net.forward(a0, INFER)[0], trained_net.forward(a0, INFER)[0])

    again = str(tmp_path / "again.bin")
    save_checkpoint(again, net, state)
    with open(checkpoint_path, "rb") as f, open(again, "rb") as g:
        assert f.read() == g.read()


def test_checkpoint_of_custom_architecture(tmp_path):
    arch = parse_architecture(SMALL_ARCHITECTURE)
    net = build_from_architecture(arch, seed=1)
    path = str(tmp_path / "small.bin")
    save_checkpoint(path, net, CheckpointState(arch))
    loaded, state = load_checkpoint(path, expected=arch)
    assert state.architecture == arch
    assert loaded.num_params == net.num_params
    with pytest.raises(CheckpointVersionError):
        load_checkpoint(path, expected=reference_architecture())


def test_encode_decode_tensors():
    tensors = {"w0": np.arange(6.0).reshape(2, 3), "b0": np.array([-0.5, 1e-300])}
    decoded = decode_tensors(encode_tensors(tensors))
    assert list(decoded) == ["w0", "b0"]
    assert_array_equal(decoded["w0"], tensors["w0"])
    assert_array_equal(decoded["b0"], tensors["b0"])


def test_decode_bad_magic():
    data = encode_tensors({"b0": np.zeros(2)})
    with pytest.raises(CheckpointError) as info:
        decode_tensors(b"CNNCKPT2" + data[8:])
    assert info.value.offset == 0


def test_decode_truncated():
    data = encode_tensors({"w0": np.ones((3, 3))})
    with pytest.raises(CheckpointError) as info:
        decode_tensors(data[:-10])
    assert not isinstance(info.value, CheckpointChecksumError)
    assert info.value.offset is not None


def test_decode_trailing_bytes():
    data = encode_tensors({"w0": np.ones(2)})
    with pytest.raises(CheckpointError):
        decode_tensors(data + b"\x00")


def test_decode_corrupt_payload():
    data = bytearray(encode_tensors({"w0": np.ones(4)}))
    data[-10] ^= 0xFF
    with pytest.raises(CheckpointChecksumError):
        decode_tensors(bytes(data))


def test_version_mismatch(tmp_path, trained_net):
    tensors = checkpoint_tensors(trained_net, CheckpointState(reference_architecture()))
    tensors["meta.format_version"] = np.array([2.0])
    path = tmp_path / "future.bin"
    path.write_bytes(encode_tensors(tensors))
    with pytest.raises(CheckpointVersionError):
        load_checkpoint(str(path))


def test_missing_tensor(tmp_path, trained_net):
    tensors = checkpoint_tensors(trained_net, CheckpointState(reference_architecture()))
    del tensors["running_var14"]
    path = tmp_path / "partial.bin"
    path.write_bytes(encode_tensors(tensors))
    with pytest.raises(CheckpointError, match="running_var14"):
        load_checkpoint(str(path))


def test_save_into_missing_directory(tmp_path, trained_net):
    with pytest.raises(FileSystemObjectError):
        save_checkpoint(
            str(tmp_path / "missing" / "ckpt.bin"),
            trained_net,
            CheckpointState(reference_architecture()),
        )


def test_csv_metrics_sink(tmp_path):
    path = str(tmp_path / "metrics.csv")
    sink = CsvMetricsSink(path)
    assert list(read_metrics(path).columns) == COLUMNS
    sink.write(MetricsRecord(0, 0, 2.5, 0.25))
    sink.write(MetricsRecord(0, 1, 2.0, 0.5))
    sink.close()
    frame = read_metrics(path)
    assert len(frame) == 2
    assert list(frame["batch"]) == [0, 1]
    assert frame["loss"].iloc[1] == 2.0
    assert sink.records[0].accuracy == 0.25


def test_inspect_lines():
    lines = inspect_lines(build_reference_net())
    assert lines[0] == "Shapes:"
    assert lines[-1] == "Total number of parameters = 44,878"
    assert any("30,720" in line and "256×120" in line for line in lines)


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


@pytest.mark.parametrize(
    "flags, expected", [([], True), (["--shuffle"], True), (["--no-shuffle"], False)]
)
def test_parse_shuffle_flag(flags, expected):
    cfg = parse_run_config(["train", "--out", "c.bin"] + flags)
    assert cfg.shuffle is expected
    assert cfg.train_config().shuffle is expected


def test_main_inspect(capsys):
    assert main(["inspect"]) == ExceptionHandler.SUCCESS
    out = capsys.readouterr().out
    assert "44,878" in out
    assert "n×16×4×4" in out
    assert "n×1×28×28" in out


def test_main_inspect_custom_architecture(tmp_path, capsys):
    path = tmp_path / "small.txt"
    path.write_text(SMALL_ARCHITECTURE)
    assert main(["inspect", "--config", str(path)]) == ExceptionHandler.SUCCESS
    assert "n×2×6×6" in capsys.readouterr().out


def test_main_train_then_eval(tmp_path, capsys):
    out = str(tmp_path / "ckpt.bin")
    argv = ["train", "--synthetic", "--epochs", "2", "--batch-size", "16"]
    argv += ["--train-limit", "32", "--seed", "7", "--out", out]
    assert main(argv) == ExceptionHandler.SUCCESS
    lines = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in lines] == ["epoch=0", "epoch=1"]

    frame = read_metrics(str(tmp_path / "ckpt_metrics.csv"))
    assert len(frame) == 4
    assert list(frame["epoch"]) == [0, 0, 1, 1]
    assert (frame["loss"] >= 0.0).all()

    _, state = load_checkpoint(out)
    assert state.epoch == 2
    assert state.seed == 7

    argv = ["eval", "--synthetic", "--test-limit", "20", "--checkpoint", out]
    assert main(argv) == ExceptionHandler.SUCCESS
    line = capsys.readouterr().out.strip()
    assert line.startswith("loss=")
    assert "accuracy=" in line
    assert line.endswith("n=20")


def test_main_train_is_deterministic(tmp_path):
    contents = []
    for name in ("a", "b"):
        out = str(tmp_path / f"{name}.bin")
        metrics = str(tmp_path / f"{name}.csv")
        argv = ["train", "--synthetic", "--epochs", "1", "--batch-size", "8"]
        argv += ["--train-limit", "16", "--out", out, "--metrics", metrics]
        assert main(argv) == ExceptionHandler.SUCCESS
        with open(out, "rb") as f, open(metrics) as g:
            contents.append((f.read(), g.read()))
    assert contents[0] == contents[1]


def test_main_eval_fingerprint_mismatch(tmp_path, checkpoint_path):
    path = tmp_path / "small.txt"
    path.write_text(SMALL_ARCHITECTURE)
    argv = ["eval", "--synthetic", "--checkpoint", checkpoint_path]
    assert main(argv + ["--config", str(path)]) == ExceptionHandler.IO_ERROR


def test_main_eval_missing_checkpoint(tmp_path):
    argv = ["eval", "--synthetic", "--checkpoint", str(tmp_path / "none.bin")]
    assert main(argv) == ExceptionHandler.IO_ERROR


def test_main_eval_corrupt_checkpoint(tmp_path, checkpoint_path, capsys):
    with open(checkpoint_path, "rb") as f:
        data = bytearray(f.read())
    data[-20] ^= 0x01
    with open(checkpoint_path, "wb") as f:
        f.write(bytes(data))
    argv = ["eval", "--synthetic", "--checkpoint", checkpoint_path]
    assert main(argv) == ExceptionHandler.IO_ERROR
    assert "error:" in capsys.readouterr().err


def test_main_gradcheck(tmp_path, capsys):
    report = tmp_path / "report.json"
    argv = ["gradcheck", "--layer", "fc", "--report", str(report)]
    assert main(argv) == ExceptionHandler.SUCCESS
    assert "1/1 checks passed" in capsys.readouterr().out
    content = json.loads(report.read_text())
    assert content["passed"] is True
    assert content["reports"][0]["target"] == "fc"


def test_main_gradcheck_tight_tolerance():
    argv = ["gradcheck", "--layer", "fc", "--tolerance", "1e-12"]
    assert main(argv) == ExceptionHandler.GRADCHECK_FAILED


@pytest.mark.parametrize(
    "argv",
    [
        ["predict"],
        ["train", "--synthetic"],
        ["train", "--synthetic", "--out", "c.bin", "--lr", "-1"],
        ["gradcheck", "--layer", "dropout"],
        ["gradcheck", "--tolerance", "0"],
        ["inspect", "--log-level", "LOUD"],
    ],
)
def test_main_invalid_input(argv):
    assert main(argv) == ExceptionHandler.INVALID_INPUT_DATA


def test_main_invalid_architecture(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("input d=1 r=28\nclasses n=10\nconv out=2 k=3 s=2\n")
    code = main(["inspect", "--config", str(path)])
    assert code == ExceptionHandler.INVALID_INPUT_DATA


def test_main_help():
    assert main(["--help"]) == ExceptionHandler.SUCCESS
