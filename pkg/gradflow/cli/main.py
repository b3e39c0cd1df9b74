"""
Command line entry point: gradflow {train,eval,gradcheck,inspect}.

Exit codes: 0 success, 1 invalid input or configuration, 2 numeric failure,
3 gradient check failure, 4 checkpoint or IO error, 5 other.
"""

# standard library imports
import argparse
import logging
import sys

# current package imports
from .checkpoint import CheckpointState, load_checkpoint, save_checkpoint
from .config import GRADCHECK_TARGETS, LOG_LEVELS, RunConfig
from .metrics import CsvMetricsSink

# local imports
from gradflow.filesys.json_file import JSONFile
from gradflow.filesys.manager import FileSystemManager
from gradflow.gradcheck.checker import run_checks
from gradflow.gradcheck.exceptions import GradCheckError
from gradflow.gradcheck.report import format_table
from gradflow.mnist.dataset import Dataset, load_mnist
from gradflow.mnist.synthetic import synthetic_dataset
from gradflow.network.builder import build_from_architecture
from gradflow.network.network import Network, format_shape
from gradflow.optim.trainer import evaluate, fit
from gradflow.utils.exception_handler import ExceptionHandler

LOG_FORMAT = "%(asctime)s %(levelname)s %(message)s"


def build_parser() -> argparse.ArgumentParser:
    """Returns the parser of every subcommand and its flags."""
    parser = argparse.ArgumentParser(
        prog="gradflow",
        description="Train, evaluate, gradient-check and inspect a small CNN.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="train a network with minibatch SGD")
    evaluation = commands.add_parser("eval", help="evaluate a checkpoint")
    gradcheck = commands.add_parser("gradcheck", help="compare gradients")
    inspect = commands.add_parser("inspect", help="print shapes and parameters")

    for sub in (train, evaluation, inspect):
        sub.add_argument("--config", help="architecture file (default: reference)")
    for sub in (train, evaluation):
        sub.add_argument("--data-dir", dest="data_dir")
        sub.add_argument(
            "--synthetic",
            action="store_true",
            default=None,
            help="use procedurally drawn digits instead of MNIST files",
        )
        sub.add_argument("--test-limit", dest="test_limit", type=int)
    for sub in (train, evaluation, gradcheck):
        sub.add_argument("--seed", type=int)

    train.add_argument("--epochs", type=int)
    train.add_argument("--batch-size", dest="batch_size", type=int)
    train.add_argument("--lr", type=float)
    train.add_argument(
        "--shuffle",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="reshuffle the training set every epoch (default: on)",
    )
    train.add_argument("--out", help="checkpoint written after every epoch")
    train.add_argument("--metrics", help="metrics CSV (default: <out>_metrics.csv)")
    train.add_argument("--train-limit", dest="train_limit", type=int)

    evaluation.add_argument("--checkpoint")

    gradcheck.add_argument("--layer", choices=GRADCHECK_TARGETS)
    gradcheck.add_argument("--tolerance", type=float)
    gradcheck.add_argument("--report", help="JSON report path")
    for sub in (train, evaluation, gradcheck, inspect):
        sub.add_argument("--log-level", dest="log_level", choices=LOG_LEVELS)
    return parser


def parse_run_config(argv: list[str] | None = None) -> RunConfig:
    """Parses 'argv' into a validated RunConfig."""
    args = build_parser().parse_args(argv)
    options = {key: value for key, value in vars(args).items() if value is not None}
    return RunConfig(**options)


def load_split(cfg: RunConfig, split: str, limit: int | None) -> Dataset:
    """Loads a dataset split, synthetic or MNIST, keeping the first 'limit' samples."""
    if cfg.synthetic:
        return synthetic_dataset(seed=cfg.seed, split=split).head(limit)
    return load_mnist(cfg.data_dir, split, limit)


def cmd_train(cfg: RunConfig) -> int:
    """
    Trains the configured network, writing one metrics line per batch and a
    checkpoint after every epoch.
    """
    FileSystemManager().assert_valid_output_path(cfg.out)
    train_cfg = cfg.train_config()
    arch = cfg.architecture()
    train_data = load_split(cfg, "train", cfg.train_limit)
    test_data = None
    if cfg.test_limit is not None:
        test_data = load_split(cfg, "test", cfg.test_limit)
    net = build_from_architecture(arch, train_cfg.seed)
    logging.info(
        "Training architecture 0x{:08x} on {} with {}.".format(
            arch.fingerprint(), train_data, train_cfg
        )
    )

    def on_epoch_end(epoch: int, trained: Network) -> None:
        save_checkpoint(cfg.out, trained, CheckpointState(arch, epoch + 1, cfg.seed))

    sink = CsvMetricsSink(cfg.metrics_path())
    try:
        summaries = fit(net, train_data, train_cfg, test_data, sink, on_epoch_end)
    finally:
        sink.close()
    for summary in summaries:
        line = f"epoch={summary.epoch} loss={summary.mean_loss!r} "
        line += f"accuracy={summary.accuracy!r}"
        if summary.test_loss is not None:
            line += (
                f" test_loss={summary.test_loss!r} "
                f"test_accuracy={summary.test_accuracy!r}"
            )
        print(line)
    return ExceptionHandler.SUCCESS


def cmd_eval(cfg: RunConfig) -> int:
    """
    Evaluates a checkpoint on the test split and prints
    'loss=<v> accuracy=<v> n=<count>'.
    """
    expected = cfg.architecture() if cfg.config is not None else None
    net, _ = load_checkpoint(cfg.checkpoint, expected)
    data = load_split(cfg, "test", cfg.test_limit)
    loss, accuracy = evaluate(net, data)
    print(f"loss={loss!r} accuracy={accuracy!r} n={len(data)}")
    return ExceptionHandler.SUCCESS


def cmd_gradcheck(cfg: RunConfig) -> int:
    """
    Runs the gradient checks, prints the table and optionally writes the JSON
    report.

    Raises
    ------
    GradCheckError
        If any check fails.
    """
    layers = None if cfg.layer is None else [cfg.layer]
    reports = run_checks(layers, seed=cfg.seed, tolerance=cfg.tolerance)
    print(format_table(reports))
    if cfg.report is not None:
        report_file = JSONFile(cfg.report)
        FileSystemManager().assert_valid_output_path(cfg.report)
        report_file.write(
            {
                "tolerance": cfg.tolerance,
                "passed": all(report.passed for report in reports),
                "reports": [report.to_dict() for report in reports],
            }
        )
    failed = [report.target for report in reports if not report.passed]
    if failed:
        msg = f"Gradient checks failed for {failed}."
        logging.error(msg)
        raise GradCheckError(msg)
    return ExceptionHandler.SUCCESS


def inspect_lines(net: Network) -> list[str]:
    """
    Shape trace and parameter ledger of 'net', in forward layer order, ending
    with the total number of trainable scalars.
    """
    lines = ["Shapes:"]
    for description, shape in net.shape_trace():
        lines.append(f"  {description:<20} {format_shape(shape)}")
    lines.append("Parameters:")
    for layer in net.layers:
        for param in layer.params:
            dims = "×".join(str(dim) for dim in param.shape)
            lines.append(f"  {param.name:<8} {dims:<16} {param.size:>8,}")
    lines.append(f"Total number of parameters = {net.num_params:,}")
    return lines


def cmd_inspect(cfg: RunConfig) -> int:
    """Prints the shape trace and parameter ledger of the configured network."""
    net = build_from_architecture(cfg.architecture(), cfg.seed)
    print("\n".join(inspect_lines(net)))
    return ExceptionHandler.SUCCESS


_COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "gradcheck": cmd_gradcheck,
    "inspect": cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    """
    Runs one command and returns its exit code. Errors are logged and mapped
    to exit codes by ExceptionHandler.
    """
    handler = ExceptionHandler()
    try:
        cfg = parse_run_config(argv)
    except SystemExit as e:
        return handler.INVALID_INPUT_DATA if e.code else handler.SUCCESS
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return handler.get_status_code(e)

    logging.basicConfig(level=cfg.log_level, format=LOG_FORMAT)
    logging.debug(str(cfg))
    try:
        return _COMMANDS[cfg.command](cfg)
    except Exception as e:
        for line in handler.get_stack_trace_info(e):
            logging.debug(line)
        print(f"error: {e}", file=sys.stderr)
        return handler.get_status_code(e)


if __name__ == "__main__":
    raise SystemExit(main())
