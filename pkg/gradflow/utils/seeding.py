"""
Seeding helpers. Every random draw in gradflow goes through an explicit
numpy Generator so runs are reproducible from a single integer seed.
"""

# 3rd party imports
import numpy as np

SEED_BITS = 64


def check_valid_seed(seed) -> str | None:
    """
    Checks that 'seed' is a non-negative int that fits in 64 bits.

    Returns
    -------
    str | None
        None if valid, otherwise a descriptive error message.
    """
    if isinstance(seed, bool) or not isinstance(seed, int):
        return f"Seed must be an int, got {type(seed)} with value '{seed}'."
    if seed < 0 or seed >= 2**SEED_BITS:
        return f"Seed must lie in [0, 2**{SEED_BITS}), got {seed}."
    return None


def make_rng(seed: int, *streams: int) -> np.random.Generator:
    """
    Returns a Generator for 'seed', optionally forked into an independent
    sub-stream identified by 'streams' (e.g. an epoch index).

    Parameters
    ----------
    seed: int
        Base seed.
    streams: int
        Extra integers mixed into the seed sequence.

    Returns
    -------
    numpy.random.Generator
    """
    return np.random.default_rng([seed, *streams])
