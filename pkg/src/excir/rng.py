"""Deterministic counter-based random numbers for synthetic data.

The generator is SplitMix64: a 64-bit counter advanced by the golden-gamma
increment, hashed through two xor-multiply rounds.  Given the same seed it
produces the same stream on every platform and in every language, which is
what keeps generated fixtures portable.  The exact algorithm, so that ports
can reproduce streams bit for bit:

    state  <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z      <- state
    z      <- ((z xor (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z      <- ((z xor (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output <- z xor (z >> 31)

Doubles in [0, 1) take the top 53 bits: (output >> 11) * 2^-53.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Counter-based 64-bit generator; see the module docstring for the exact algorithm."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_uint64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_uint64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via the double path (n must be small)."""
        return min(int(self.random() * n), n - 1)

    def bernoulli(self, p: float) -> int:
        return 1 if self.random() < p else 0
