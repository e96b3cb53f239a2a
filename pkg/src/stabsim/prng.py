"""SplitMix64 pseudo-random generator.

A tiny counter-based generator is used instead of ``numpy.random`` so that
generated circuits and random states are reproducible bit for bit across
platforms and library versions, and so independent streams can be derived
from a seed and a stream index.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int, stream: int = 0):
        self.state = (seed & _MASK) if stream == 0 else _mix((seed + _GOLDEN * (stream + 1)) & _MASK)

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return _mix(self.state)

    def below(self, k: int) -> int:
        """Uniform integer in ``[0, k)`` by multiply-shift."""
        if k <= 0:
            raise ValueError("k must be positive")
        return (self.next_u64() * k) >> 64

    def choice(self, items):
        return items[self.below(len(items))]

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
