"""Seed handling: one integer seed in, independent child streams out."""

import numpy as np


def root_generator(seed):
    """Generator for a user seed; ``None`` means seed 0 so runs stay reproducible."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(0 if seed is None else seed)


def split(rng, k):
    """``k`` statistically independent child generators of ``rng``."""
    return root_generator(rng).spawn(k)
