"""Deterministic seeding utilities built on SplitMix64.

All randomness in the package flows from a single 64-bit master seed through
these functions, so every run is reproducible bit-for-bit across platforms
and degrees of parallelism. SplitMix64 is used as a counter-based generator:
output k of a stream with seed s is ``mix64(s + (k+1)*GAMMA) mod 2^64``.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, *indices: int) -> int:
    """Derive a child seed from a master seed and integer indices.

    Used to key Monte Carlo trials by (snr_index, frame_index) so results do
    not depend on scheduling order.
    """
    x = master_seed & MASK64
    for v in indices:
        x = mix64((x + (int(v) + 1) * GAMMA) & MASK64)
    return x


def _vec_mix64(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x ^= x >> np.uint64(30)
    x *= np.uint64(0xBF58476D1CE4E5B9)
    x ^= x >> np.uint64(27)
    x *= np.uint64(0x94D049BB133111EB)
    x ^= x >> np.uint64(31)
    return x


def stream_u64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Outputs ``offset .. offset+count-1`` of the SplitMix64 stream for seed."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _vec_mix64(np.uint64(seed & MASK64) + idx * np.uint64(GAMMA))


def stream_uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Doubles in the open interval (0, 1), from the same counter stream."""
    bits = stream_u64(seed, count, offset)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


class SplitMix64:
    """Sequential SplitMix64, for consumers that draw one value at a time."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return mix64(self._state)

    def next_below(self, n: int) -> int:
        """Uniform-ish integer in [0, n); modulo bias is irrelevant here."""
        return self.next_u64() % n
