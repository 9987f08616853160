"""SplitMix64: a tiny counter-based generator with portable output.

The n-th output (n = 1, 2, ...) of a stream with seed ``s`` is
``mix(s + n * GOLDEN)`` modulo 2**64, where ``mix`` is the finaliser from
Steele, Lea & Flood (2014).  Uniform doubles take the top 53 bits.  The
constants below are the whole definition; any language with 64-bit
unsigned arithmetic reproduces the stream exactly.
"""

from __future__ import annotations

GENERATOR_NAME = "splitmix64-v1"

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & _MASK
        return mix64(self.state)

    def uniform(self) -> float:
        """Double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def member_seed(master_seed: int, index: int) -> int:
    """Seed of ensemble member ``index`` (0-based): output ``index + 1`` of the master stream."""
    return mix64(master_seed + (index + 1) * GOLDEN)
