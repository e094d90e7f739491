"""Deterministic random stream (splitmix64) and the per-trial seed mixer.

The generator is pinned here rather than borrowed from the stdlib so that a
trial's draw sequence is a documented part of the reproducibility contract:
``next_u64`` advances the state by the 64-bit golden-ratio constant and
returns the finalized state; ``below(n)`` draws one word and reduces it
modulo ``n``.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _fmix64(z: int) -> int:
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return _fmix64(self._state)

    def below(self, n: int) -> int:
        """Uniform-ish integer in [0, n): one draw, modulo reduction."""
        if n <= 0:
            raise ValueError("below() needs n >= 1")
        # next_u64 inlined; this is the hot call of the simulation loop.
        s = self._state = (self._state + _GOLDEN) & MASK64
        z = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) % n


def mix_seed(base_seed: int, trial_index: int) -> int:
    """Derive trial seeds from a base seed.

    Equals the ``trial_index + 1``-th output of a splitmix64 stream seeded
    with ``base_seed``, so distinct trial indices always get distinct seeds.
    """
    if trial_index < 0:
        raise ValueError("trial_index must be non-negative")
    return _fmix64((base_seed + (trial_index + 1) * _GOLDEN) & MASK64)
