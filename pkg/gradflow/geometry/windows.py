"""
Sliding-window arithmetic: output resolution, patch enumeration, explicit zero
padding (external and internal), im2col, kernel unroll/roll and the weight
rotation used by the fractionally strided backward convolution.

Notes
-----
- Padding is always materialized as a zero-filled canvas.
- im2col rows are ordered (depth, kernel row, kernel col); columns are ordered
  (patch row-major, then sample), the same enumeration as tensor.ops.f2d_t.
"""

# standard library imports
import logging

# current package imports
from .exceptions import GeometryError
from .sampling import SamplingTriplet, backward_sampling

# local imports
from gradflow.tensor.ops import assert_rank

# 3rd party imports
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

Cell = tuple[int, int]


def out_resolution(r_in: int, p: SamplingTriplet) -> int:
    """
    Spatial size of the output of a sliding window over an input of resolution
    'r_in': floor((r_in + 2p - k) / s) + 1.

    Raises
    ------
    GeometryError
        If no patch fits, i.e. r_in + 2p < k.
    """
    p.assert_fits(r_in)
    return (r_in + 2 * p.p - p.k) // p.s + 1


def enumerate_patches(r_in: int, p: SamplingTriplet) -> list[Cell]:
    """
    Origins (row, col) of every patch in padded coordinates, row-major. Each
    patch covers k x k padded cells starting at its origin.
    """
    r_out = out_resolution(r_in, p)
    return [(i * p.s, j * p.s) for i in range(r_out) for j in range(r_out)]


def pad(a: np.ndarray, padding: int) -> np.ndarray:
    """
    Returns 'a' (n x d x r x r) embedded in a zero-filled canvas with
    'padding' extra cells on every side.
    """
    assert_rank(a, 4, "a")
    if padding < 0:
        msg = f"Padding cannot be negative, got {padding}."
        logging.error(msg)
        raise GeometryError(msg)
    if padding == 0:
        return a
    n, d, r_h, r_w = a.shape
    canvas = np.zeros((n, d, r_h + 2 * padding, r_w + 2 * padding), dtype=a.dtype)
    canvas[:, :, padding : padding + r_h, padding : padding + r_w] = a
    return canvas


def dilate_internal(delta: np.ndarray, gap: int) -> np.ndarray:
    """
    Inserts 'gap' zero cells between adjacent cells of both spatial dimensions:
    resolution r becomes r + (r - 1) * gap, original values sit at stride
    gap + 1.
    """
    assert_rank(delta, 4, "delta")
    if gap < 0:
        msg = f"Internal gap cannot be negative, got {gap}."
        logging.error(msg)
        raise GeometryError(msg)
    if gap == 0:
        return delta
    n, d, r_h, r_w = delta.shape
    step = gap + 1
    out = np.zeros(
        (n, d, r_h + (r_h - 1) * gap, r_w + (r_w - 1) * gap), dtype=delta.dtype
    )
    out[:, :, ::step, ::step] = delta
    return out


def extract_windows(a: np.ndarray, p: SamplingTriplet) -> np.ndarray:
    """
    Returns a read-only view of every patch of the padded input with shape
    (n, d, r_out, r_out, k, k).
    """
    assert_rank(a, 4, "a")
    r_out = out_resolution(a.shape[2], p)
    padded = pad(a, p.p)
    windows = sliding_window_view(padded, (p.k, p.k), axis=(2, 3))
    return windows[:, :, :: p.s, :: p.s][:, :, :r_out, :r_out]


def im2col(a: np.ndarray, p: SamplingTriplet) -> np.ndarray:
    """
    Lays every patch of 'a' out as a column: the result has shape
    (d * k * k) x (r_out * r_out * n).

    Column (q, s) holds the d * k * k padded-input cells of patch q of sample s,
    at index q * n + s.
    """
    windows = extract_windows(a, p)
    n, d, r_out, _, k, _ = windows.shape
    cols = windows.transpose(1, 4, 5, 2, 3, 0)
    return np.ascontiguousarray(cols).reshape(d * k * k, r_out * r_out * n)


def unroll_kernels(w: np.ndarray) -> np.ndarray:
    """
    Unrolls a d_out x d_in x k x k filter bank into a d_out x (d_in * k * k)
    Matrix, row order matching im2col.
    """
    assert_rank(w, 4, "w")
    d_out, d_in, k_h, k_w = w.shape
    if k_h != k_w:
        msg = f"Kernels must be square, got shape {w.shape}."
        logging.error(msg)
        raise GeometryError(msg)
    return np.ascontiguousarray(w).reshape(d_out, d_in * k_h * k_w)


def roll_kernels(w: np.ndarray, d_in: int, k: int) -> np.ndarray:
    """
    Inverse of unroll_kernels: restores the depth and space dimensions of a
    d_out x (d_in * k * k) Matrix.
    """
    assert_rank(w, 2, "w")
    if w.shape[1] != d_in * k * k:
        msg = (
            f"Cannot roll a matrix of shape {w.shape} into kernels with "
            f"d_in={d_in}, k={k}."
        )
        logging.error(msg)
        raise GeometryError(msg)
    return np.ascontiguousarray(w).reshape(w.shape[0], d_in, k, k)


def rot180_transpose_depth(w: np.ndarray) -> np.ndarray:
    """
    Swaps the two depth dimensions of a filter bank and rotates every kernel by
    180 degrees: out[c_in, c_out, i, j] == w[c_out, c_in, k-1-i, k-1-j].
    """
    assert_rank(w, 4, "w")
    return np.ascontiguousarray(w.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1])


def forward_connectivity(r_in: int, p: SamplingTriplet) -> set[tuple[Cell, Cell]]:
    """
    Every (input cell, output cell) pair joined by a forward sliding window.
    Cells falling on the padding are not part of the input and are skipped.
    """
    r_out = out_resolution(r_in, p)
    pairs = set()
    for o_i in range(r_out):
        for o_j in range(r_out):
            for k_i in range(p.k):
                for k_j in range(p.k):
                    x_i = o_i * p.s + k_i - p.p
                    x_j = o_j * p.s + k_j - p.p
                    if 0 <= x_i < r_in and 0 <= x_j < r_in:
                        pairs.add(((x_i, x_j), (o_i, o_j)))
    return pairs


def backward_connectivity(r_in: int, p: SamplingTriplet) -> set[tuple[Cell, Cell]]:
    """
    Every (input cell, output cell) pair joined by the fractionally strided
    backward convolution: the error of output cell o reaches input cell x when
    the unit-stride window of x covers the dilated, padded position of o.
    """
    r_out = out_resolution(r_in, p)
    back = backward_sampling(p)
    step = back.internal_gap + 1
    r_dilated = r_out + (r_out - 1) * back.internal_gap
    r_back = out_resolution(r_dilated, back.base)

    # canvas position -> error cell, only for cells holding real error values
    canvas = {}
    for o_i in range(r_out):
        for o_j in range(r_out):
            canvas[(o_i * step + back.base.p, o_j * step + back.base.p)] = (o_i, o_j)

    pairs = set()
    for x_i in range(min(r_back, r_in)):
        for x_j in range(min(r_back, r_in)):
            for k_i in range(back.base.k):
                for k_j in range(back.base.k):
                    cell = canvas.get((x_i + k_i, x_j + k_j))
                    if cell is not None:
                        pairs.add(((x_i, x_j), cell))
    return pairs
