"""Reproducible, splittable random streams.

A stream is identified by a 64-bit (seed, stream_index) pair.  The pair is
mixed through the SplitMix64 avalanche function into a key for numpy's PCG64
generator, so equal pairs give bitwise-equal draw sequences on every platform
and regardless of how many other streams exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer; a bijective 64-bit avalanche mix."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_key(seed: int, stream_index: int) -> int:
    """Mix a (seed, stream_index) pair into a single 64-bit generator key."""
    return splitmix64(splitmix64(seed & _MASK64) ^ splitmix64(stream_index & _MASK64))


@dataclass
class RngStream:
    """A named substream of the global seed.

    The underlying generator is created lazily; all sampler draws on the same
    stream consume a single deterministic sequence.
    """

    seed: int
    stream_index: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = np.random.Generator(np.random.PCG64(derive_key(self.seed, self.stream_index)))
        return self._gen

    def substream(self, index: int) -> "RngStream":
        """Derive an independent child stream; deterministic in (self, index)."""
        return RngStream(derive_key(self.seed, self.stream_index), index)
