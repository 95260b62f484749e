"""Deterministic derivation of RNG streams from a master seed."""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def rng_from(seed: int, *stream: int) -> np.random.Generator:
    """Generator keyed by (seed, *stream); identical keys give identical streams."""
    entropy = [int(seed) & _MASK] + [int(s) & _MASK for s in stream]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def child_seed(seed: int, *stream: int) -> int:
    """64-bit integer seed derived from (seed, *stream)."""
    entropy = [int(seed) & _MASK] + [int(s) & _MASK for s in stream]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])
