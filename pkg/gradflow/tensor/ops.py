"""
Dense float64 arrays and the products, broadcasts and reshapes the layers are
written with.

Arrays are plain numpy ndarrays of rank 1 (Vector), 2 (Matrix, samples stacked
vertically as rows) and 4 (Tensor4, layout (n, d, row, col)). Operations never
mutate their inputs.

Notes
-----
- f2d_t / f4d_t enumerate the rows of the folded matrix "spatial row-major,
  then sample": cell (s, c, i, j) of an n x d x r x r tensor lives at row
  (i * r + j) * n + s, column c. im2col uses the same column order so that the
  GEMM output of a convolution folds back with f4d.
- Division by a per-feature vector is written as diag_broadcast_mul with
  reciprocals, never as a matrix inverse.
"""

# standard library imports
import logging

# current package imports
from .exceptions import ShapeError

# 3rd party imports
import numpy as np

DTYPE = np.float64


def _raise_shape_error(msg: str) -> None:
    logging.error(msg)
    raise ShapeError(msg)


def check_rank(a: np.ndarray, rank: int, label: str) -> str | None:
    """
    Returns an error message if 'a' is not a numpy array of rank 'rank'.
    """
    if not isinstance(a, np.ndarray):
        return f"'{label}' must be a numpy array, got {type(a)}."
    if a.ndim != rank:
        return f"'{label}' must have rank {rank}, got shape {a.shape}."
    if 0 in a.shape:
        return f"'{label}' cannot have an empty dimension, got shape {a.shape}."
    return None


def assert_rank(a: np.ndarray, rank: int, label: str) -> None:
    """
    Raises ShapeError if 'a' is not a non-empty numpy array of rank 'rank'.
    """
    msg = check_rank(a, rank, label)
    if msg:
        _raise_shape_error(msg)


def assert_same_shape(a: np.ndarray, b: np.ndarray, op_name: str) -> None:
    """
    Raises ShapeError if 'a' and 'b' have different shapes.
    """
    if a.shape != b.shape:
        _raise_shape_error(
            f"{op_name}: shapes {a.shape} and {b.shape} must be identical."
        )


def matrix(data, rows: int = None, cols: int = None) -> np.ndarray:
    """
    Builds a float64 Matrix from nested sequences or a flat row-major sequence.

    Parameters
    ----------
    data: array-like
        Nested rows, or a flat sequence when 'rows' and 'cols' are given.
    rows: int, optional
    cols: int, optional

    Returns
    -------
    np.ndarray
        Array of shape (rows, cols).
    """
    arr = np.array(data, dtype=DTYPE)
    if rows is not None and cols is not None:
        if arr.size != rows * cols:
            _raise_shape_error(
                f"matrix: {arr.size} values cannot fill a {rows}x{cols} matrix."
            )
        arr = arr.reshape(rows, cols)
    assert_rank(arr, 2, "matrix")
    return arr


def tensor4(data, n: int = None, d: int = None, r_h: int = None, r_w: int = None):
    """
    Builds a float64 Tensor4 of layout (n, d, row, col) from nested sequences
    or from a flat row-major sequence plus its four dimensions.
    """
    arr = np.array(data, dtype=DTYPE)
    dims = (n, d, r_h, r_w)
    if all(dim is not None for dim in dims):
        if arr.size != n * d * r_h * r_w:
            _raise_shape_error(
                f"tensor4: {arr.size} values cannot fill a {n}x{d}x{r_h}x{r_w} tensor."
            )
        arr = arr.reshape(dims)
    assert_rank(arr, 4, "tensor4")
    return arr


def vector(data) -> np.ndarray:
    """
    Builds a float64 Vector from a sequence.
    """
    arr = np.array(data, dtype=DTYPE).reshape(-1)
    assert_rank(arr, 1, "vector")
    return arr


def transpose(a: np.ndarray) -> np.ndarray:
    """
    Returns the transpose of a Matrix.
    """
    assert_rank(a, 2, "a")
    return np.ascontiguousarray(a.T)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Standard matrix product of an n x f Matrix with an f x m Matrix.

    Raises
    ------
    ShapeError
        If a.cols != b.rows; the message names both shapes.
    """
    assert_rank(a, 2, "a")
    assert_rank(b, 2, "b")
    if a.shape[1] != b.shape[0]:
        _raise_shape_error(
            f"matmul: cannot multiply shape {a.shape} by shape {b.shape}."
        )
    return a @ b


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Elementwise product of two Matrix (or two Tensor4) operands of identical shape.
    """
    assert_same_shape(a, b, "hadamard")
    return a * b


def frobenius(a: np.ndarray, b: np.ndarray) -> float:
    """
    Frobenius product: the sum of the entries of the Hadamard product.
    """
    assert_same_shape(a, b, "frobenius")
    return float(np.sum(a * b))


def feature_dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Per-sample dot products between the feature vectors (rows) of two n x f
    matrices. Summing the result gives frobenius(a, b).
    """
    assert_rank(a, 2, "a")
    assert_same_shape(a, b, "feature_dot")
    return np.sum(a * b, axis=1)


def broadcast_add_bias(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Adds a bias vector to every sample of 'a'.

    For a Matrix of shape n x f the bias has length f and is replicated over
    the rows. For a Tensor4 of shape n x d x r x r the bias is depth-indexed
    (length d) and is replicated over samples and both spatial dimensions.
    """
    assert_rank(b, 1, "b")
    if a.ndim == 2:
        if b.shape[0] != a.shape[1]:
            _raise_shape_error(
                f"broadcast_add_bias: bias of length {b.shape[0]} does not match "
                f"matrix of shape {a.shape}."
            )
        return a + b[np.newaxis, :]
    if a.ndim == 4:
        if b.shape[0] != a.shape[1]:
            _raise_shape_error(
                f"broadcast_add_bias: bias of length {b.shape[0]} does not match "
                f"the depth of tensor of shape {a.shape}."
            )
        return a + b[np.newaxis, :, np.newaxis, np.newaxis]
    _raise_shape_error(
        f"broadcast_add_bias: expected a rank 2 or rank 4 array, got shape {a.shape}."
    )


def contract_bias(delta: np.ndarray) -> np.ndarray:
    """
    Sums an n x f error Matrix over its samples, giving a length f Vector.
    """
    assert_rank(delta, 2, "delta")
    return np.sum(delta, axis=0)


def contract_bias_4d(delta: np.ndarray) -> np.ndarray:
    """
    Sums an n x d x r x r error Tensor4 over samples and both spatial
    dimensions, giving a length d Vector.
    """
    assert_rank(delta, 4, "delta")
    return np.sum(delta, axis=(0, 2, 3))


def diag_broadcast_mul(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """
    Scales column j of 'a' by w[j]; equal to a . diag(w) without building the
    diagonal matrix.
    """
    assert_rank(a, 2, "a")
    assert_rank(w, 1, "w")
    if w.shape[0] != a.shape[1]:
        _raise_shape_error(
            f"diag_broadcast_mul: vector of length {w.shape[0]} does not match "
            f"matrix of shape {a.shape}."
        )
    return a * w[np.newaxis, :]


def diag(a: np.ndarray) -> np.ndarray:
    """
    Returns the diagonal of a square Matrix as a Vector.
    """
    assert_rank(a, 2, "a")
    if a.shape[0] != a.shape[1]:
        _raise_shape_error(f"diag: matrix of shape {a.shape} is not square.")
    return np.diagonal(a).copy()


def f2d_t(a: np.ndarray) -> np.ndarray:
    """
    Folds an n x d x r x r Tensor4 into an (r * r * n) x d Matrix.

    Cell (s, c, i, j) goes to row (i * r + j) * n + s, column c.
    """
    assert_rank(a, 4, "a")
    n, d, r_h, r_w = a.shape
    return np.ascontiguousarray(a.transpose(2, 3, 0, 1)).reshape(r_h * r_w * n, d)


def f4d_t(a: np.ndarray, n: int, d: int, r: int) -> np.ndarray:
    """
    Inverse of f2d_t: unfolds an (r * r * n) x d Matrix into an n x d x r x r
    Tensor4.

    Raises
    ------
    ShapeError
        If the matrix shape disagrees with (n, d, r).
    """
    assert_rank(a, 2, "a")
    if a.shape != (r * r * n, d):
        _raise_shape_error(
            f"f4d_t: matrix of shape {a.shape} cannot unfold into "
            f"n={n}, d={d}, r={r} (expected {(r * r * n, d)})."
        )
    return np.ascontiguousarray(a.reshape(r, r, n, d).transpose(2, 3, 0, 1))


def f2d(a: np.ndarray) -> np.ndarray:
    """
    Folds an n x d x r x r Tensor4 into a d x (r * r * n) Matrix (transpose of
    f2d_t).
    """
    return transpose(f2d_t(a))


def f4d(a: np.ndarray, n: int, r: int) -> np.ndarray:
    """
    Inverse of f2d: unfolds a d x (r * r * n) Matrix into an n x d x r x r
    Tensor4.
    """
    assert_rank(a, 2, "a")
    return f4d_t(transpose(a), n=n, d=a.shape[0], r=r)
