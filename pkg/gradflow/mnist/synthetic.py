"""
Deterministic stand-in for MNIST: procedurally drawn seven-segment digits on
a 28 x 28 canvas, jittered in position, stroke width and intensity.
"""

# current package imports
from .dataset import N_CLASSES, Dataset, one_hot

# local imports
from gradflow.utils.seeding import make_rng

# 3rd party imports
import numpy as np

RESOLUTION = 28
SAMPLES_PER_CLASS = 16

# segments: top, top right, bottom right, bottom, bottom left, top left, middle
_SEGMENTS = {
    0: "abcdef",
    1: "bc",
    2: "abged",
    3: "abgcd",
    4: "fgbc",
    5: "afgcd",
    6: "afgedc",
    7: "abc",
    8: "abcdefg",
    9: "abcdfg",
}


def _segment_box(
    segment: str, top: int, left: int, height: int, width: int, t: int
) -> tuple[int, int, int, int]:
    mid = top + height // 2
    bottom = top + height
    right = left + width
    boxes = {
        "a": (top, top + t, left, right),
        "b": (top, mid, right - t, right),
        "c": (mid, bottom, right - t, right),
        "d": (bottom - t, bottom, left, right),
        "e": (mid, bottom, left, left + t),
        "f": (top, mid, left, left + t),
        "g": (mid - t // 2, mid - t // 2 + t, left, right),
    }
    return boxes[segment]


def draw_digit(digit: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draws one jittered 28 x 28 image of 'digit' with values in [0, 1].
    """
    canvas = np.zeros((RESOLUTION, RESOLUTION), dtype=np.float64)
    height = int(rng.integers(16, 21))
    width = int(rng.integers(9, 13))
    t = int(rng.integers(2, 4))
    top = int(rng.integers(2, RESOLUTION - height - 1))
    left = int(rng.integers(4, RESOLUTION - width - 3))
    intensity = rng.uniform(0.7, 1.0)
    for segment in _SEGMENTS[digit]:
        r0, r1, c0, c1 = _segment_box(segment, top, left, height, width, t)
        canvas[r0:r1, c0:c1] = intensity
    canvas += rng.uniform(0.0, 0.1, size=canvas.shape)
    return np.clip(canvas, 0.0, 1.0)


def synthetic_dataset(
    samples_per_class: int = SAMPLES_PER_CLASS, seed: int = 0, split: str = "train"
) -> Dataset:
    """
    Builds a dataset of 'samples_per_class' drawings per digit, classes
    interleaved (sample i shows digit i mod 10). Identical for identical
    arguments.

    Returns
    -------
    Dataset
        N x 1 x 28 x 28 images, N = 10 * samples_per_class.
    """
    rng = make_rng(seed, 0 if split == "train" else 1)
    n = N_CLASSES * samples_per_class
    labels = np.arange(n) % N_CLASSES
    images = np.stack([draw_digit(int(digit), rng) for digit in labels])
    return Dataset(images[:, np.newaxis], one_hot(labels), split)
