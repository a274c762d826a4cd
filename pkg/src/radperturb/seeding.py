"""Deterministic seed derivation.

Each perturbation instance gets its own seeds up front, so results never
depend on execution order or worker count. Sub-seeds come from the
SplitMix64 finaliser applied to ``(master, index, stream)``; random numbers
come from a counter-based Philox generator keyed by the seed.
"""

import numpy as np

_MASK = (1 << 64) - 1

NOISE_STREAM = 1
CONTOUR_STREAM = 2
VOLUME_STREAM = 3


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(master: int, index: int, stream: int = 0) -> int:
    """Stable 64-bit seed for ``(master, index, stream)``."""
    h = splitmix64(master & _MASK)
    h = splitmix64(h ^ (index & _MASK))
    return splitmix64(h ^ (stream & _MASK))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _MASK))
