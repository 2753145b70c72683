"""Portable seedable PRNG (xoshiro256** with splitmix64 seeding).

Scenario generation must be reproducible bit-for-bit across platforms and
implementations, so the generator is pinned to a published update rule
rather than to a host library's default stream.
"""
from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** 1.0; state expanded from a 64-bit seed via splitmix64."""

    def __init__(self, seed: int):
        self._s = [0, 0, 0, 0]
        z = seed & MASK64
        for i in range(4):
            z = (z + 0x9E3779B97F4A7C15) & MASK64
            w = z
            w = ((w ^ (w >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
            w = ((w ^ (w >> 27)) * 0x94D049BB133111EB) & MASK64
            self._s[i] = (w ^ (w >> 31)) & MASK64

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) using the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (unbiased)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
