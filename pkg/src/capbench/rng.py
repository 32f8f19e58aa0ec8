"""Portable deterministic randomness for perturbation runs.

Every random draw in a perturbation run must be a pure function of
(run_seed, caption_id, task_id) so that manifests are bit-reproducible
across reruns, platforms, and reimplementations in other languages.
Python's ``random`` module ties outputs to CPython's Mersenne Twister;
instead we pin a tiny 64-bit pipeline:

* stream seed = FNV-1a 64 over ``"{run_seed}|{caption_id}|{task_id}"`` (UTF-8)
* generator   = SplitMix64
* bounded draw = ``next_u64() % n`` (modulo; bias is negligible for the
  tiny ``n`` used here and keeps the recipe trivial to port)
* shuffle     = Fisher-Yates with the swap index drawn for i = n-1 .. 1
"""

from __future__ import annotations

from typing import Iterable, Sequence, TypeVar

_MASK64 = (1 << 64) - 1

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3

T = TypeVar("T")


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


def stable_seed(run_seed: int, caption_id: str, task_id: str) -> int:
    """Stream seed for one (caption, task) pair within a run."""
    key = f"{run_seed}|{caption_id}|{task_id}".encode("utf-8")
    return fnv1a_64(key)


class SeededRng:
    """SplitMix64 generator with the draw conventions pinned above."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    @classmethod
    def for_task(cls, run_seed: int, caption_id: str, task_id: str) -> "SeededRng":
        return cls(stable_seed(run_seed, caption_id, task_id))

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform draw from [0, n)."""
        if n <= 0:
            raise ValueError(f"below() needs a positive bound, got {n}")
        return self.next_u64() % n

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def shuffled(self, items: Iterable[T]) -> list[T]:
        """Fisher-Yates permutation consuming one draw per i = n-1 .. 1."""
        out = list(items)
        for i in range(len(out) - 1, 0, -1):
            j = self.below(i + 1)
            out[i], out[j] = out[j], out[i]
        return out
