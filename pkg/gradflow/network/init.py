"""
Weight initialization: uniform in +/- sqrt(6 / (fan_in + fan_out)), zero
biases. Batch norm layers start at w = 1, b = 0.
"""

# 3rd party imports
import numpy as np


def glorot_limit(fan_in: int, fan_out: int) -> float:
    """Half-width of the uniform initialization range."""
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_fc(
    rng: np.random.Generator, f_in: int, f_out: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Returns (w, b) for a fully connected layer: w of shape f_in x f_out drawn
    uniformly, b zeros.
    """
    limit = glorot_limit(f_in, f_out)
    w = rng.uniform(-limit, limit, size=(f_in, f_out))
    return w, np.zeros(f_out)


def init_conv(
    rng: np.random.Generator, d_out: int, d_in: int, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Returns (w, b) for a convolution: w of shape d_out x d_in x k x k with fans
    computed over d * k * k, b zeros.
    """
    limit = glorot_limit(d_in * k * k, d_out * k * k)
    w = rng.uniform(-limit, limit, size=(d_out, d_in, k, k))
    return w, np.zeros(d_out)
