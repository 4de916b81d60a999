"""SplitMix64: a tiny portable 64-bit generator with published reference outputs.

Streams are derived deterministically: trial ``t`` of seed ``s`` is seeded
with the ``(t + 1)``-th output of ``SplitMix64(s)``, so every trial can be
regenerated on its own without replaying earlier trials.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` by rejection (no modulo bias)."""
        span = hi - lo + 1
        if span <= 0:
            raise ValueError("empty range")
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            draw = self.next_u64()
            if draw < limit:
                return lo + draw % span


def trial_stream(seed: int, trial_index: int) -> SplitMix64:
    root = SplitMix64(seed)
    value = 0
    for _ in range(trial_index + 1):
        value = root.next_u64()
    return SplitMix64(value)
