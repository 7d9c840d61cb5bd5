"""Deterministic RNG substreams.

Every stochastic operation in the package draws from a Generator derived from
the run's master seed plus a call-site path, so adding or reordering one stage
never shifts the random numbers seen by another.
"""
from __future__ import annotations

import zlib

import numpy as np


def _token(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode("utf-8"))


def substream(master_seed: int, *path) -> np.random.Generator:
    """Return an independent Generator for (master_seed, *path).

    Args:
        master_seed: the run-level seed.
        *path: call-site labels (strings or ints), e.g. ("noise", 3, 1, 0).
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(_token(p) for p in path))
    return np.random.default_rng(seq)
