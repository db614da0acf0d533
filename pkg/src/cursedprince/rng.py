"""Deterministic 64-bit mixing used everywhere a reproducible stream is needed.

SplitMix64 with its published constants is the project-wide PRNG: battle
transcripts, monster targeting, and balance simulations all derive their
randomness from it so that equal seeds give bit-equal runs on any host.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(state: int) -> tuple[int, int]:
    """One SplitMix64 step: returns (output, next_state)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31), state


def fnv1a64(text: str) -> int:
    """FNV-1a hash of a string, used to fold identifiers into a seed."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


def derive(seed: int, *keys: int | str) -> int:
    """Derive one 64-bit value from a seed and a key tuple.

    Each key (string keys are FNV-1a hashed first) is xored into the running
    state and pushed through a SplitMix64 step, so unrelated key tuples give
    independent streams from the same seed.
    """
    state = seed & MASK64
    for key in keys:
        folded = fnv1a64(key) if isinstance(key, str) else key & MASK64
        state, _ = splitmix64(state ^ folded)
    return state


class SplitMix64:
    """Sequential SplitMix64 stream for consumers that want many draws."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        value, self._state = splitmix64(self._state)
        return value

    def below(self, bound: int) -> int:
        """Draw an integer in [0, bound). bound must be positive."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound
