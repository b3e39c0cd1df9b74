"""
In-memory datasets of (image, one-hot label) pairs and their minibatching.
"""

# standard library imports
import logging
import os

# current package imports
from .exceptions import DatasetError
from .idx import load_idx_images, load_idx_labels

# local imports
from gradflow.filesys.dir import Dir
from gradflow.utils.exceptions import EnvironmentVariableNotSetError
from gradflow.utils.seeding import make_rng

# 3rd party imports
import numpy as np

N_CLASSES = 10
DATA_DIR_ENV_VAR = "GRADFLOW_DATA_DIR"
SPLITS = {"train": "train", "test": "t10k"}


def one_hot(labels: np.ndarray, n_classes: int = N_CLASSES) -> np.ndarray:
    """
    Encodes a Vector of class indices as an N x n_classes one-hot Matrix.

    Raises
    ------
    DatasetError
        If any index lies outside [0, n_classes).
    """
    labels = np.asarray(labels)
    if labels.ndim != 1:
        msg = f"Labels must be a Vector of class indices, got shape {labels.shape}."
        logging.error(msg)
        raise DatasetError(msg)
    bad = np.flatnonzero((labels < 0) | (labels >= n_classes))
    if bad.size:
        msg = (
            f"Class index {labels[bad[0]]} at position {bad[0]} outside "
            f"[0, {n_classes})."
        )
        logging.error(msg)
        raise DatasetError(msg)
    encoded = np.zeros((labels.shape[0], n_classes), dtype=np.float64)
    encoded[np.arange(labels.shape[0]), labels.astype(np.int64)] = 1.0
    return encoded


class Dataset:
    """
    Pairs of input samples and one-hot labels. Treated as read-only.

    Attributes
    ----------
    images : np.ndarray
        N x d x r x r Tensor4 (or N x f Matrix) of inputs.
    labels : np.ndarray
        N x n_c one-hot Matrix.
    split : str
        'train', 'test' or any other tag.
    """

    def __init__(self, images: np.ndarray, labels: np.ndarray, split: str = "train"):
        images = np.asarray(images, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.float64)
        if labels.ndim != 2:
            msg = f"Labels must be a one-hot Matrix, got shape {labels.shape}."
            logging.error(msg)
            raise DatasetError(msg)
        if images.shape[0] != labels.shape[0]:
            msg = (
                f"Image count {images.shape[0]} differs from label count "
                f"{labels.shape[0]}."
            )
            logging.error(msg)
            raise DatasetError(msg)
        self._images = images
        self._labels = labels
        self._split = split

    @property
    def images(self) -> np.ndarray:
        return self._images

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @property
    def split(self) -> str:
        return self._split

    @property
    def n_classes(self) -> int:
        return self._labels.shape[1]

    @property
    def sample_shape(self) -> tuple[int, ...]:
        return self._images.shape[1:]

    def __len__(self) -> int:
        return self._images.shape[0]

    def class_indices(self) -> np.ndarray:
        """Returns the Vector of ground-truth class indices."""
        return np.argmax(self._labels, axis=1)

    def take(self, indices: np.ndarray) -> "Dataset":
        """Returns a new dataset holding the samples at 'indices', in order."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(self._images[indices], self._labels[indices], self._split)

    def head(self, limit: int = None) -> "Dataset":
        """Returns the first 'limit' samples (all of them if limit is None)."""
        if limit is None or limit >= len(self):
            return self
        if limit < 1:
            msg = f"A dataset subset needs at least one sample, got limit={limit}."
            logging.error(msg)
            raise DatasetError(msg)
        return self.take(np.arange(limit))

    def __str__(self) -> str:
        return f"Dataset(split={self._split}, n={len(self)}, shape={self.sample_shape})"


class BatchIterator:
    """
    Iterates over (A0, Y_gt) minibatches of a dataset.

    With 'shuffle' the sample order is a permutation drawn from the
    (seed, epoch) stream, otherwise the dataset order. A final partial batch
    smaller than 'min_batch' is dropped.
    """

    def __init__(
        self,
        dataset: Dataset,
        batch_size: int,
        shuffle: bool = False,
        seed: int = 0,
        epoch: int = 0,
        min_batch: int = 1,
    ) -> None:
        if batch_size < 1:
            msg = f"Batch size must be at least 1, got {batch_size}."
            logging.error(msg)
            raise DatasetError(msg)
        self._dataset = dataset
        self._batch_size = batch_size
        self._min_batch = min_batch
        n = len(dataset)
        if shuffle:
            self._order = make_rng(seed, epoch).permutation(n)
        else:
            self._order = np.arange(n)

    @property
    def order(self) -> np.ndarray:
        """Returns the sample order of this epoch."""
        return self._order.copy()

    def batch_indices(self) -> list[np.ndarray]:
        """Returns the dataset indices of every batch, in iteration order."""
        n = len(self._order)
        chunks = [
            self._order[start : start + self._batch_size]
            for start in range(0, n, self._batch_size)
        ]
        if chunks and len(chunks[-1]) < self._min_batch:
            logging.debug(
                "Dropping final partial batch of {} samples.".format(len(chunks[-1]))
            )
            chunks = chunks[:-1]
        return chunks

    def __len__(self) -> int:
        return len(self.batch_indices())

    def __iter__(self):
        for indices in self.batch_indices():
            yield self._dataset.images[indices], self._dataset.labels[indices]


def batches(
    dataset: Dataset,
    batch_size: int,
    shuffle: bool = False,
    seed: int = 0,
    epoch: int = 0,
    min_batch: int = 1,
) -> BatchIterator:
    """
    Returns the minibatch iterator of 'dataset' for one epoch. Every sample is
    visited at most once; the order is deterministic under (seed, epoch).
    """
    return BatchIterator(dataset, batch_size, shuffle, seed, epoch, min_batch)


def resolve_data_dir(data_dir: str = None) -> str:
    """
    Returns 'data_dir', falling back to the GRADFLOW_DATA_DIR environment
    variable.

    Raises
    ------
    EnvironmentVariableNotSetError
        If neither is set.
    """
    if data_dir:
        return data_dir
    env_dir = os.environ.get(DATA_DIR_ENV_VAR)
    if env_dir:
        return env_dir
    msg = f"No data directory given and {DATA_DIR_ENV_VAR} is not set."
    logging.error(msg)
    raise EnvironmentVariableNotSetError(msg)


def idx_filenames(split: str, kind: str) -> list[str]:
    """
    Candidate file names of a split's images ('images-idx3') or labels
    ('labels-idx1') file, raw name first.
    """
    stem = f"{SPLITS[split]}-{kind}-ubyte"
    return [stem, f"{stem}.gz"]


def load_mnist(data_dir: str = None, split: str = "train", limit: int = None):
    """
    Loads an MNIST split from '<data_dir>/{train,t10k}-{images-idx3,labels-idx1}-
    ubyte[.gz]'.

    Parameters
    ----------
    data_dir: str
        Directory of the IDX files; GRADFLOW_DATA_DIR if None.
    split: str
        'train' or 'test'.
    limit: int
        Keep only the first 'limit' samples.

    Returns
    -------
    Dataset

    Raises
    ------
    DatasetError
        If the split is unknown, a file is missing or the counts disagree.
    """
    if split not in SPLITS:
        msg = f"Unknown split '{split}'. Valid options: {list(SPLITS)}"
        logging.error(msg)
        raise DatasetError(msg)
    data = Dir(resolve_data_dir(data_dir))
    data.assert_exists()

    paths = {}
    for kind in ("images-idx3", "labels-idx1"):
        found = data.find_first_file(idx_filenames(split, kind))
        if found is None:
            msg = (
                f"Missing MNIST {split} file in '{data.path}', looked for "
                f"{idx_filenames(split, kind)}."
            )
            logging.error(msg)
            raise DatasetError(msg)
        paths[kind] = found.path

    images = load_idx_images(paths["images-idx3"])
    labels = load_idx_labels(paths["labels-idx1"], N_CLASSES)
    if images.shape[0] != labels.shape[0]:
        msg = (
            f"MNIST {split}: {images.shape[0]} images but {labels.shape[0]} labels."
        )
        logging.error(msg)
        raise DatasetError(msg)
    return Dataset(images, one_hot(labels, N_CLASSES), split).head(limit)

