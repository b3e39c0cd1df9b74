"""
Sampling triplets describing every sliding-window operation (convolution and
maxpool): kernel size k, stride s and zero padding p, all in cells.
"""

# standard library imports
import logging

# current package imports
from .exceptions import GeometryError


class SamplingTriplet:
    """
    Geometric descriptor p = (k, s, p) of a sliding window.

    Attributes
    ----------
    k : int
        Kernel size (cells), k >= 1.
    s : int
        Stride (cells), s >= 1.
    p : int
        Zero padding added on every side (cells), p >= 0.
    """

    def __init__(self, k: int, s: int = 1, p: int = 0) -> None:
        msg = check_valid_triplet(k, s, p)
        if msg:
            logging.error(msg)
            raise GeometryError(msg)
        self._k = k
        self._s = s
        self._p = p

    @property
    def k(self) -> int:
        """Returns the kernel size."""
        return self._k

    @property
    def s(self) -> int:
        """Returns the stride."""
        return self._s

    @property
    def p(self) -> int:
        """Returns the padding."""
        return self._p

    def check_fits(self, r_in: int) -> str | None:
        """
        Returns an error message if no patch fits an input of resolution 'r_in'.
        """
        if isinstance(r_in, bool) or not isinstance(r_in, int) or r_in < 1:
            return f"Input resolution must be a positive int, got '{r_in}'."
        if r_in + 2 * self._p < self._k:
            return (
                f"No patch of {self} fits an input of resolution r_in={r_in} "
                f"(r_in + 2p = {r_in + 2 * self._p} < k = {self._k})."
            )
        return None

    def assert_fits(self, r_in: int) -> None:
        """
        Raises GeometryError if no patch fits an input of resolution 'r_in'.
        """
        msg = self.check_fits(r_in)
        if msg:
            logging.error(msg)
            raise GeometryError(msg)

    def is_exact_fit(self, r_in: int) -> bool:
        """
        Returns True if the windows cover the padded input without dropping
        trailing cells, i.e. (r_in + 2p - k) is divisible by s.
        """
        return (r_in + 2 * self._p - self._k) % self._s == 0

    def to_dict(self) -> dict:
        """Serializes the triplet into a dictionary."""
        return {"k": self._k, "s": self._s, "p": self._p}

    def __str__(self) -> str:
        return f"(k={self._k}, s={self._s}, p={self._p})"

    def __repr__(self) -> str:
        return f"SamplingTriplet{self}"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SamplingTriplet):
            return False
        return (self._k, self._s, self._p) == (other._k, other._s, other._p)

    def __hash__(self) -> int:
        return hash((self._k, self._s, self._p))


class BackwardSampling:
    """
    Sampling used by the fractionally strided convolution of the backward pass:
    a unit-stride triplet plus the number of zero cells inserted between
    adjacent error cells.

    Attributes
    ----------
    base : SamplingTriplet
        (k, 1, k - p - 1) for a forward triplet (k, s, p).
    internal_gap : int
        Zero cells inserted between adjacent error cells (s - 1).
    """

    def __init__(self, base: SamplingTriplet, internal_gap: int) -> None:
        if base.s != 1:
            msg = f"Backward sampling must have unit stride, got {base}."
            logging.error(msg)
            raise GeometryError(msg)
        if internal_gap < 0:
            msg = f"Internal gap cannot be negative, got {internal_gap}."
            logging.error(msg)
            raise GeometryError(msg)
        self._base = base
        self._internal_gap = internal_gap

    @property
    def base(self) -> SamplingTriplet:
        """Returns the unit-stride triplet."""
        return self._base

    @property
    def internal_gap(self) -> int:
        """Returns the number of zeros inserted between adjacent error cells."""
        return self._internal_gap

    def __str__(self) -> str:
        return f"BackwardSampling(base={self._base}, internal_gap={self._internal_gap})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BackwardSampling):
            return False
        return (
            self._base == other._base and self._internal_gap == other._internal_gap
        )


def check_valid_triplet(k: int, s: int, p: int) -> str | None:
    """
    Checks k >= 1, s >= 1 and p >= 0 (all ints).

    Returns
    -------
    str | None
        None if valid, otherwise a descriptive error message.
    """
    for label, value, minimum in (("k", k, 1), ("s", s, 1), ("p", p, 0)):
        if isinstance(value, bool) or not isinstance(value, int):
            return f"Sampling parameter '{label}' must be an int, got '{value}'."
        if value < minimum:
            return f"Sampling parameter '{label}' must be >= {minimum}, got {value}."
    return None


def backward_sampling(p_fwd: SamplingTriplet) -> BackwardSampling:
    """
    Derives the fractionally strided sampling of the backward pass from the
    forward triplet: base (k, 1, k - p - 1) and internal gap s - 1.

    Raises
    ------
    GeometryError
        If k - p - 1 < 0 (over-padded forward convolution, unsupported).
    """
    p_back = p_fwd.k - p_fwd.p - 1
    if p_back < 0:
        msg = (
            f"Forward sampling {p_fwd} is over-padded: the backward padding "
            f"k - p - 1 = {p_back} would be negative."
        )
        logging.error(msg)
        raise GeometryError(msg)
    return BackwardSampling(
        base=SamplingTriplet(k=p_fwd.k, s=1, p=p_back),
        internal_gap=p_fwd.s - 1,
    )
