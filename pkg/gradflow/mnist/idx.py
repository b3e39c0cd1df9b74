"""
Parser for the IDX files MNIST is distributed in.

Layout (big-endian):

    images: u32 magic 0x00000803 | u32 count | u32 rows | u32 cols | u8 pixels
    labels: u32 magic 0x00000801 | u32 count | u8 labels

Gzip-compressed files are recognized by their first two bytes and
decompressed transparently.
"""

# standard library imports
import gzip
import logging
import struct
import zlib

# current package imports
from .exceptions import IdxParseError

# local imports
from gradflow.filesys.file import File

# 3rd party imports
import numpy as np

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
GZIP_MAGIC = b"\x1f\x8b"
IMAGES_HEADER = ">IIII"
LABELS_HEADER = ">II"
PIXEL_SCALE = 255.0


def is_gzip(data: bytes) -> bool:
    """Returns True if 'data' starts with the gzip magic bytes."""
    return data[:2] == GZIP_MAGIC


def read_idx_bytes(path: str) -> bytes:
    """
    Reads an IDX file, decompressing it if it is gzipped.

    Raises
    ------
    IdxParseError
        If a gzipped file is corrupt.
    """
    data = File(path).read_bytes()
    if not is_gzip(data):
        return data
    try:
        return gzip.decompress(data)
    except (OSError, EOFError, zlib.error) as e:
        msg = f"Corrupt gzip stream in '{path}': {e}"
        logging.error(msg)
        raise IdxParseError(msg, offset=0) from e


def _unpack_header(data: bytes, fmt: str, magic: int, what: str) -> tuple:
    size = struct.calcsize(fmt)
    if len(data) < size:
        msg = f"IDX {what} header truncated: need {size} bytes, got {len(data)}"
        logging.error(msg)
        raise IdxParseError(msg, offset=len(data))
    fields = struct.unpack_from(fmt, data, 0)
    if fields[0] != magic:
        msg = f"Wrong IDX {what} magic 0x{fields[0]:08x}, expected 0x{magic:08x}"
        logging.error(msg)
        raise IdxParseError(msg, offset=0)
    return fields[1:]


def _assert_payload_length(data: bytes, header_size: int, expected: int, what: str):
    actual = len(data) - header_size
    if actual != expected:
        msg = (
            f"IDX {what} payload holds {actual} bytes, the header declares "
            f"{expected}"
        )
        logging.error(msg)
        raise IdxParseError(msg, offset=header_size + min(actual, expected))


def parse_idx_images(data: bytes) -> np.ndarray:
    """
    Parses the bytes of an IDX images file.

    Returns
    -------
    np.ndarray
        count x 1 x rows x cols float64 Tensor4 with pixels scaled by 1/255.
    """
    count, rows, cols = _unpack_header(data, IMAGES_HEADER, IMAGES_MAGIC, "images")
    header_size = struct.calcsize(IMAGES_HEADER)
    _assert_payload_length(data, header_size, count * rows * cols, "images")
    pixels = np.frombuffer(data, dtype=np.uint8, offset=header_size)
    images = pixels.reshape(count, 1, rows, cols).astype(np.float64) / PIXEL_SCALE
    return images


def parse_idx_labels(data: bytes, n_classes: int = 10) -> np.ndarray:
    """
    Parses the bytes of an IDX labels file.

    Returns
    -------
    np.ndarray
        Vector of class indices (int64).

    Raises
    ------
    IdxParseError
        On a bad header, a payload length mismatch or a label >= n_classes.
    """
    (count,) = _unpack_header(data, LABELS_HEADER, LABELS_MAGIC, "labels")
    header_size = struct.calcsize(LABELS_HEADER)
    _assert_payload_length(data, header_size, count, "labels")
    labels = np.frombuffer(data, dtype=np.uint8, offset=header_size).astype(np.int64)
    bad = np.flatnonzero(labels >= n_classes)
    if bad.size:
        msg = f"Label {labels[bad[0]]} outside [0, {n_classes}) at sample {bad[0]}"
        logging.error(msg)
        raise IdxParseError(msg, offset=header_size + int(bad[0]))
    return labels


def load_idx_images(path: str) -> np.ndarray:
    """Loads an IDX images file (raw or gzipped), see parse_idx_images."""
    images = parse_idx_images(read_idx_bytes(path))
    logging.info(
        "Loaded {} images of shape {} from '{}'.".format(
            images.shape[0], images.shape[1:], path
        )
    )
    return images


def load_idx_labels(path: str, n_classes: int = 10) -> np.ndarray:
    """Loads an IDX labels file (raw or gzipped), see parse_idx_labels."""
    labels = parse_idx_labels(read_idx_bytes(path), n_classes)
    logging.info("Loaded {} labels from '{}'.".format(labels.shape[0], path))
    return labels


def encode_idx_images(images: np.ndarray) -> bytes:
    """
    Serializes a count x 1 x rows x cols Tensor4 with values in [0, 1] into an
    IDX images file (pixels rounded to the nearest byte).
    """
    count, _, rows, cols = images.shape
    pixels = np.clip(np.rint(images * PIXEL_SCALE), 0, 255).astype(np.uint8)
    header = struct.pack(IMAGES_HEADER, IMAGES_MAGIC, count, rows, cols)
    return header + pixels.tobytes()


def encode_idx_labels(labels: np.ndarray) -> bytes:
    """Serializes a Vector of class indices into an IDX labels file."""
    labels = np.asarray(labels)
    header = struct.pack(LABELS_HEADER, LABELS_MAGIC, labels.shape[0])
    return header + labels.astype(np.uint8).tobytes()
