"""
Epoch and minibatch training loop and held-out evaluation.

Each training step runs forward (train mode), loss, backward and one SGD
update. One pass over every minibatch of the training set is one epoch.
"""

# standard library imports
import logging
from typing import Callable, NamedTuple

# current package imports
from .config import TrainConfig
from .exceptions import EvaluationError, TrainConfigError, TrainingError
from .sgd import sgd_step

# local imports
from gradflow.geometry.exceptions import GeometryError
from gradflow.layers.activation import cross_entropy_loss, softmax_forward
from gradflow.layers.batchnorm import BatchNorm
from gradflow.layers.exceptions import LayerError
from gradflow.layers.layer import INFER, TRAIN
from gradflow.mnist.dataset import Dataset, batches
from gradflow.network.exceptions import NetworkError
from gradflow.network.network import Network
from gradflow.tensor.exceptions import TensorError

# 3rd party imports
import numpy as np

EVAL_BATCH_SIZE = 256


class MetricsRecord(NamedTuple):
    """
    Metrics of one training step: mean per-sample loss of the batch and the
    accuracy over the epoch's batches so far.
    """

    epoch: int
    batch: int
    loss: float
    accuracy: float


class EpochSummary(NamedTuple):
    """
    Per-epoch results of fit(); the test fields are None without a held-out
    dataset.
    """

    epoch: int
    mean_loss: float
    accuracy: float
    test_loss: float | None
    test_accuracy: float | None


class MetricsSink:
    """
    Receives one MetricsRecord per training step. The base sink keeps the
    records in memory.
    """

    def __init__(self) -> None:
        self._records: list[MetricsRecord] = []

    @property
    def records(self) -> list[MetricsRecord]:
        return list(self._records)

    def write(self, record: MetricsRecord) -> None:
        self._records.append(record)

    def close(self) -> None:
        pass


def has_batchnorm(net: Network) -> bool:
    """Returns True if any layer of 'net' normalizes with batch statistics."""
    return any(isinstance(layer, BatchNorm) for layer in net.layers)


def count_correct(y_pred: np.ndarray, y_gt: np.ndarray) -> int:
    """Number of rows whose predicted class equals the ground-truth class."""
    return int(np.sum(np.argmax(y_pred, axis=1) == np.argmax(y_gt, axis=1)))


def train_step(
    net: Network, a0: np.ndarray, y_gt: np.ndarray, learning_rate: float
) -> tuple[float, int]:
    """
    One forward, backward and update cycle on a minibatch.

    Returns
    -------
    tuple[float, int]
        The batch loss L_batch (sum over samples) and the number of correctly
        classified samples (before the update).
    """
    logits, _ = net.forward(a0, TRAIN)
    y_pred = softmax_forward(logits)
    _, total = cross_entropy_loss(y_pred, y_gt)
    net.backward(y_pred, y_gt)
    sgd_step(net.collect_params(), None, learning_rate)
    return total, count_correct(y_pred, y_gt)


def train_epoch(
    net: Network,
    data: Dataset,
    cfg: TrainConfig,
    epoch: int = 0,
    sink: MetricsSink = None,
) -> list[MetricsRecord]:
    """
    Trains 'net' for one pass over the minibatches of 'data'.

    Parameters
    ----------
    net: Network
    data: Dataset
    cfg: TrainConfig
    epoch: int
        Epoch index; selects the shuffling stream together with cfg.seed.
    sink: MetricsSink
        Receives every record as it is produced.

    Returns
    -------
    list[MetricsRecord]
        One record per batch.

    Raises
    ------
    TrainingError
        If a step fails; the epoch and batch index are attached.
    """
    min_batch = 2 if has_batchnorm(net) else 1
    if cfg.batch_size < min_batch:
        msg = (
            f"Batch size {cfg.batch_size} is too small for a network with batch "
            f"normalization (minimum {min_batch})."
        )
        logging.error(msg)
        raise TrainConfigError(msg)

    records = []
    seen = 0
    correct = 0
    iterator = batches(
        data, cfg.batch_size, cfg.shuffle, cfg.seed, epoch, min_batch=min_batch
    )
    for batch, (a0, y_gt) in enumerate(iterator):
        try:
            total, n_correct = train_step(net, a0, y_gt, cfg.learning_rate)
        except (LayerError, NetworkError, TensorError, GeometryError) as e:
            net.clear_caches()
            msg = f"Training failed at epoch {epoch}, batch {batch}: {e}"
            logging.error(msg)
            raise TrainingError(msg, epoch=epoch, batch=batch) from e
        n = a0.shape[0]
        seen += n
        correct += n_correct
        record = MetricsRecord(epoch, batch, total / n, correct / seen)
        logging.debug(
            "epoch {} batch {}: loss={:.6f} accuracy={:.4f}".format(*record)
        )
        records.append(record)
        if sink is not None:
            sink.write(record)
    return records


def evaluate(
    net: Network, data: Dataset, batch_size: int = EVAL_BATCH_SIZE
) -> tuple[float, float]:
    """
    Infer-mode evaluation (batch norm uses its running statistics).

    Returns
    -------
    tuple[float, float]
        Mean per-sample cross-entropy loss and the fraction of samples whose
        arg-max prediction matches the label.

    Raises
    ------
    EvaluationError
        If 'data' is empty.
    """
    if len(data) == 0:
        msg = "Cannot evaluate a network on an empty dataset."
        logging.error(msg)
        raise EvaluationError(msg)
    total_loss = 0.0
    correct = 0
    for a0, y_gt in batches(data, batch_size):
        logits, _ = net.forward(a0, INFER)
        y_pred = softmax_forward(logits)
        _, total = cross_entropy_loss(y_pred, y_gt)
        total_loss += total
        correct += count_correct(y_pred, y_gt)
    n = len(data)
    logging.info(
        "Evaluated {} samples of split '{}': loss={:.6f} accuracy={:.4f}".format(
            n, data.split, total_loss / n, correct / n
        )
    )
    return total_loss / n, correct / n


def fit(
    net: Network,
    train: Dataset,
    cfg: TrainConfig,
    test: Dataset = None,
    sink: MetricsSink = None,
    on_epoch_end: Callable[[int, Network], None] = None,
) -> list[EpochSummary]:
    """
    Runs cfg.epochs epochs of train_epoch, evaluating on 'test' after each
    epoch when given, and calling 'on_epoch_end(epoch, net)' (e.g. to write a
    checkpoint).
    """
    summaries = []
    for epoch in range(cfg.epochs):
        records = train_epoch(net, train, cfg, epoch, sink)
        mean_loss = float(np.mean([r.loss for r in records])) if records else 0.0
        accuracy = records[-1].accuracy if records else 0.0
        test_loss, test_accuracy = None, None
        if test is not None:
            test_loss, test_accuracy = evaluate(net, test)
        summary = EpochSummary(epoch, mean_loss, accuracy, test_loss, test_accuracy)
        logging.info(
            "Epoch {}/{}: mean loss {:.6f}, train accuracy {:.4f}".format(
                epoch + 1, cfg.epochs, mean_loss, accuracy
            )
        )
        summaries.append(summary)
        if on_epoch_end is not None:
            on_epoch_end(epoch, net)
    return summaries
