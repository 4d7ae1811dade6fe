"""Deterministic seeding utilities.

All randomness in this package flows from one master seed through splitmix64.
The compiled and pure forest kernels reimplement the same generator, so bit
identity across backends depends on these exact constants and update rules.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 output scrambler."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Minimal splitmix64 stream; `state` is exposed so a consumer can hand
    the stream off to one of the forest kernels mid-sequence."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def below(self, n: int) -> int:
        """Uniform-ish draw in [0, n). Modulo bias is irrelevant for the
        small n used here; determinism across backends is what matters."""
        return self.next_u64() % n


def splitmix_stream(seed: int, count: int) -> np.ndarray:
    """Vectorized splitmix64: the first `count` outputs of SplitMix64(seed).

    The state advances by a fixed increment per draw, so draw k is just
    mix64(seed + k * GOLDEN); after this the scalar stream's state would be
    seed + count * GOLDEN. Used for bootstrap sampling, where per-draw Python
    calls would dominate forest training.
    """
    ks = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + ks * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def derive_seed(master: int, *path: int) -> int:
    """Derive an independent child seed from a master seed and an index path.

    Used for per-tree seeds, per-repeat fold seeds and per-fold forest seeds,
    so every run is reproducible from the single master seed.
    """
    state = master & MASK64
    for p in path:
        state = mix64((state + (p + 1) * GOLDEN) & MASK64)
    return state
