"""Deterministic seed derivation shared by the harness and the kinf tools.

Replication i of a run seeded with ``master`` always uses
``derive_seed(master, i)``, regardless of worker count or scheduling
order.  The derivation is a splitmix64 step so that neighbouring indices
produce uncorrelated streams.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """One splitmix64 output for a 64-bit state."""
    z = (state + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(master: int, index: int) -> int:
    """Seed for stream ``index`` derived from a master seed."""
    if index < 0:
        raise ValueError("stream index must be nonnegative")
    return splitmix64(((master & _MASK) + index * _GOLDEN) & _MASK)


def make_rng(seed: int) -> np.random.Generator:
    """The one generator construction used everywhere in the package."""
    return np.random.Generator(np.random.PCG64(seed))
