"""Named random streams derived from a run seed.

Every stochastic component draws from its own PCG64 stream keyed by
``(seed, label)``; two components of the same run never share a stream, so
e.g. interleaving two optimisers cannot shift either one's random sequence.
"""

import zlib

import numpy as np


def stream(seed: int, label: str) -> np.random.Generator:
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), key])))


def run_seeds(base_seed: int, runs: int) -> list[int]:
    """Distinct per-run seeds for a campaign; run ``i`` gets the same seed for every algorithm."""
    return [int(base_seed) + i for i in range(runs)]
