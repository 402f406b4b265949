"""Deterministic random-stream derivation.

Every stochastic routine in the package draws from a stream derived from a
64-bit master seed plus a tuple of integer indices (experiment cell, trial,
...).  The same (master, indices) always yields the same stream, independent
of platform, process, or worker count.
"""

import random

import numpy as np

__all__ = ["spawn_seed", "py_rng", "np_rng"]

_MASK64 = (1 << 64) - 1


def spawn_seed(master: int, *indices: int) -> int:
    """Derive a 64-bit sub-seed from a master seed and an index tuple."""
    ss = np.random.SeedSequence([int(master) & _MASK64, *[int(i) & _MASK64 for i in indices]])
    words = ss.generate_state(2, dtype=np.uint64)
    return int(words[0]) ^ (int(words[1]) << 1) & _MASK64


def py_rng(master: int, *indices: int) -> random.Random:
    """A `random.Random` seeded from (master, indices)."""
    return random.Random(spawn_seed(master, *indices))


def np_rng(master: int, *indices: int) -> np.random.Generator:
    """A numpy Generator seeded from (master, indices)."""
    ss = np.random.SeedSequence([int(master) & _MASK64, *[int(i) & _MASK64 for i in indices]])
    return np.random.Generator(np.random.PCG64(ss))
