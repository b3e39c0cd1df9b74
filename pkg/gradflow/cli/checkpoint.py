"""
Binary checkpoints of named float64 tensors.

Layout (little-endian):

    b"CNNCKPT1"
    u32 tensor count
    per tensor: u16 name length, name (ascii), u8 rank, rank x u64 dims,
                row-major f64 payload
    u32 CRC-32 of every preceding byte

Besides the parameters ('w4', 'b4', ...) and batch norm running statistics
('running_mean2', ...) a checkpoint holds metadata tensors: 'meta.format_version',
'meta.fingerprint' (CRC-32 of the canonical architecture text), 'meta.epoch',
'meta.seed' (high and low 32-bit halves) and 'meta.architecture' (the
canonical architecture text as byte values).
"""

# standard library imports
import logging
import math
import struct
import zlib
from typing import NamedTuple

# current package imports
from .exceptions import (
    CheckpointChecksumError,
    CheckpointError,
    CheckpointVersionError,
)

# local imports
from gradflow.filesys.file import File
from gradflow.filesys.manager import FileSystemManager
from gradflow.network.architecture import Architecture, parse_architecture
from gradflow.network.builder import build_from_architecture
from gradflow.network.exceptions import ArchitectureError
from gradflow.network.network import Network

# 3rd party imports
import numpy as np

MAGIC = b"CNNCKPT1"
FORMAT_VERSION = 1
META_PREFIX = "meta."
_U16 = struct.Struct("<H")
_U8 = struct.Struct("<B")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_F64 = np.dtype("<f8")


class CheckpointState(NamedTuple):
    """
    Everything besides the tensors a checkpoint restores.
    """

    architecture: Architecture
    epoch: int = 0
    seed: int = 0


def encode_tensors(tensors: dict[str, np.ndarray]) -> bytes:
    """
    Serializes named tensors, in dictionary order, into the checkpoint layout
    (checksum included).
    """
    chunks = [MAGIC, _U32.pack(len(tensors))]
    for name, value in tensors.items():
        name_bytes = name.encode("ascii")
        value = np.ascontiguousarray(value, dtype=_F64)
        chunks.append(_U16.pack(len(name_bytes)))
        chunks.append(name_bytes)
        chunks.append(_U8.pack(value.ndim))
        chunks.extend(_U64.pack(dim) for dim in value.shape)
        chunks.append(value.tobytes())
    body = b"".join(chunks)
    return body + _U32.pack(zlib.crc32(body))


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            msg = (
                f"Checkpoint truncated while reading {what}: expected at least "
                f"{end} bytes, got {len(self.data)}"
            )
            logging.error(msg)
            raise CheckpointError(msg, offset=self.offset)
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: struct.Struct, what: str) -> int:
        return fmt.unpack(self.take(fmt.size, what))[0]


def decode_tensors(data: bytes) -> dict[str, np.ndarray]:
    """
    Parses checkpoint bytes into named tensors, in file order.

    Raises
    ------
    CheckpointError
        On a bad magic, truncated content or trailing garbage.
    CheckpointChecksumError
        If the structure is intact but the CRC-32 does not match.
    """
    reader = _Reader(data)
    magic = reader.take(len(MAGIC), "magic")
    if magic != MAGIC:
        msg = f"Not a checkpoint: magic {magic!r}, expected {MAGIC!r}"
        logging.error(msg)
        raise CheckpointError(msg, offset=0)

    count = reader.unpack(_U32, "tensor count")
    tensors = {}
    for _ in range(count):
        name_offset = reader.offset
        name_length = reader.unpack(_U16, "name length")
        try:
            name = reader.take(name_length, "name").decode("ascii")
        except UnicodeDecodeError as e:
            msg = f"Tensor name is not ascii: {e}"
            logging.error(msg)
            raise CheckpointError(msg, offset=name_offset) from e
        if name in tensors:
            msg = f"Duplicate tensor name '{name}'"
            logging.error(msg)
            raise CheckpointError(msg, offset=name_offset)
        rank = reader.unpack(_U8, f"rank of '{name}'")
        dims = tuple(reader.unpack(_U64, f"dims of '{name}'") for _ in range(rank))
        size = math.prod(dims)
        payload = reader.take(size * _F64.itemsize, f"payload of '{name}'")
        tensors[name] = np.frombuffer(payload, dtype=_F64).reshape(dims).copy()

    expected = reader.offset + _U32.size
    if len(data) != expected:
        msg = f"Checkpoint length {len(data)} differs from expected {expected}"
        logging.error(msg)
        raise CheckpointError(msg, offset=reader.offset)
    stored = _U32.unpack(data[reader.offset :])[0]
    actual = zlib.crc32(data[: reader.offset])
    if stored != actual:
        msg = f"Checksum mismatch: stored 0x{stored:08x}, computed 0x{actual:08x}"
        logging.error(msg)
        raise CheckpointChecksumError(msg, offset=reader.offset)
    return tensors


def _text_tensor(text: str) -> np.ndarray:
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8).astype(np.float64)


def _tensor_text(value: np.ndarray) -> str:
    return bytes(value.astype(np.uint8).tolist()).decode("ascii")


def checkpoint_tensors(net: Network, state: CheckpointState) -> dict[str, np.ndarray]:
    """
    Collects the metadata, parameter and state tensors of 'net' in the order
    they are written.
    """
    seed = int(state.seed)
    tensors = {
        "meta.format_version": np.array([FORMAT_VERSION], dtype=np.float64),
        "meta.fingerprint": np.array(
            [state.architecture.fingerprint()], dtype=np.float64
        ),
        "meta.epoch": np.array([state.epoch], dtype=np.float64),
        "meta.seed": np.array([seed >> 32, seed & 0xFFFFFFFF], dtype=np.float64),
        "meta.architecture": _text_tensor(state.architecture.to_text()),
    }
    for param in net.collect_params():
        tensors[param.name] = param.value
    tensors.update(net.state_tensors())
    return tensors


def save_checkpoint(path: str, net: Network, state: CheckpointState) -> None:
    """
    Writes 'net' and 'state' to 'path'.

    Raises
    ------
    FileSystemObjectError
        If the parent directory of 'path' does not exist.
    """
    FileSystemManager().assert_valid_output_path(path)
    data = encode_tensors(checkpoint_tensors(net, state))
    File(path).write_bytes(data)
    logging.info("Saved checkpoint '{}' (epoch {}).".format(path, state.epoch))


def _meta_int(tensors: dict[str, np.ndarray], name: str) -> int:
    if name not in tensors or tensors[name].shape != (1,):
        msg = f"Checkpoint lacks metadata tensor '{name}'"
        logging.error(msg)
        raise CheckpointError(msg)
    return int(tensors[name][0])


def restore_network(
    tensors: dict[str, np.ndarray], expected: Architecture = None
) -> tuple[Network, CheckpointState]:
    """
    Rebuilds the network described by decoded checkpoint tensors.

    Raises
    ------
    CheckpointVersionError
        On an unsupported format version or when the stored fingerprint does
        not match the stored architecture or 'expected'.
    CheckpointError
        When tensors are missing, unknown or of the wrong shape.
    """
    version = _meta_int(tensors, "meta.format_version")
    if version != FORMAT_VERSION:
        msg = f"Unsupported checkpoint format version {version}"
        logging.error(msg)
        raise CheckpointVersionError(msg)
    if "meta.architecture" not in tensors or "meta.seed" not in tensors:
        msg = "Checkpoint lacks its architecture or seed metadata"
        logging.error(msg)
        raise CheckpointError(msg)
    try:
        arch = parse_architecture(_tensor_text(tensors["meta.architecture"]))
    except (ArchitectureError, UnicodeDecodeError, ValueError) as e:
        msg = f"Stored architecture is invalid: {e}"
        logging.error(msg)
        raise CheckpointError(msg) from e

    fingerprint = _meta_int(tensors, "meta.fingerprint")
    if fingerprint != arch.fingerprint():
        msg = "Stored fingerprint does not match the stored architecture"
        logging.error(msg)
        raise CheckpointVersionError(msg)
    if expected is not None and expected.fingerprint() != fingerprint:
        msg = (
            f"Architecture fingerprint mismatch: checkpoint 0x{fingerprint:08x}, "
            f"expected 0x{expected.fingerprint():08x}"
        )
        logging.error(msg)
        raise CheckpointVersionError(msg)

    hi, lo = (int(v) for v in tensors["meta.seed"])
    state = CheckpointState(arch, _meta_int(tensors, "meta.epoch"), (hi << 32) | lo)
    net = build_from_architecture(arch, state.seed)

    params = {param.name: param for param in net.collect_params()}
    state_names = set(net.state_tensors())
    expected_names = set(params) | state_names
    stored_names = {name for name in tensors if not name.startswith(META_PREFIX)}
    if stored_names != expected_names:
        msg = (
            f"Checkpoint tensors do not match the architecture: missing "
            f"{sorted(expected_names - stored_names)}, unknown "
            f"{sorted(stored_names - expected_names)}"
        )
        logging.error(msg)
        raise CheckpointError(msg)
    for name in sorted(stored_names):
        value = tensors[name]
        if name in params:
            if value.shape != params[name].shape:
                msg = (
                    f"Tensor '{name}' has shape {value.shape}, expected "
                    f"{params[name].shape}"
                )
                logging.error(msg)
                raise CheckpointError(msg)
            params[name].set_value(value)
        else:
            net.load_state_tensor(name, value)
    return net, state


def load_checkpoint(
    path: str, expected: Architecture = None
) -> tuple[Network, CheckpointState]:
    """
    Reads the checkpoint at 'path' and rebuilds its network.

    Parameters
    ----------
    path: str
    expected: Architecture
        If given, the checkpoint must have been written for this architecture.
    """
    checkpoint_file = File(path)
    checkpoint_file.assert_exists()
    net, state = restore_network(decode_tensors(checkpoint_file.read_bytes()), expected)
    logging.info("Loaded checkpoint '{}' (epoch {}).".format(path, state.epoch))
    return net, state
