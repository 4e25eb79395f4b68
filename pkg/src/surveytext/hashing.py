"""Deterministic 64-bit hashing and random streams.

Everything downstream that needs randomness (noise injection, seed
derivation) or stable text hashing (feature hashing) is built on the two
primitives here, so that independent runs — and independent
implementations — produce bit-identical results.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes | str) -> int:
    """FNV-1a 64-bit hash. Strings are hashed as their UTF-8 bytes."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


class SplitMix64:
    """splitmix64 stream: the standard finalizer-based generator.

    next_u64 advances the state by the golden-gamma constant and mixes.
    next_float maps a u64 draw onto [0, 1) as ``u / 2**64`` (exact in
    IEEE double rounding, identical on every platform).
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return self.next_u64() / 2.0**64

    def next_index(self, n: int) -> int:
        """Uniform index in [0, n) as ``next_u64() mod n``."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n


def derive_seed(seed: int, label: str) -> int:
    """Per-task seed: the run seed XORed with the FNV-1a hash of a label.

    Labels are stable strings like ``"corpus.inject_noise"`` so that every
    consumer of randomness gets an independent, reproducible stream no
    matter in which order tasks execute.
    """
    return (seed ^ fnv1a64(label)) & _MASK64
