"""Seeded xorshift64* random streams.

One stream per Markov chain, derived as ``seed XOR stream_id`` pushed through
two rounds of splitmix64.  The numba kernels in ``_kernels`` advance the same
recurrence on uint64 state arrays, so a pure-Python chain and its compiled
counterpart consume identical random sequences.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D
_GAMMA = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0  # 2^-53


def splitmix64(z: int) -> int:
    z = (z + _GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def stream_state(seed: int, stream: int = 0) -> int:
    """Initial xorshift64* state for stream ``stream`` of ``seed``; never 0."""
    z = splitmix64(splitmix64((seed ^ stream) & MASK64))
    return z if z != 0 else _GAMMA


class Stream:
    """xorshift64* generator; uniforms take the top 53 bits of the output."""

    __slots__ = ("state",)

    def __init__(self, seed: int, stream: int = 0):
        self.state = stream_state(seed, stream)

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & MASK64

    def uniform(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) * _INV_2_53

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return int(self.uniform() * n)
