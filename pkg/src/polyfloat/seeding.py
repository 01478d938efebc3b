"""Reproducible random streams.

A stream is identified by ``(seed, stream_id)``; both are 64-bit integers and
the pair is fed to :class:`numpy.random.SeedSequence` as entropy plus spawn
key, so distinct stream ids give independent PCG64 streams.

Stream ids for experiment trials come from :func:`derive_seed`::

    stream_id = splitmix64(splitmix64(trial) ^ fnv1a64(tag))

``splitmix64`` is the finalizer of Steele et al.'s SplitMix64 generator (a
bijection on 64-bit words) and ``fnv1a64`` is the 64-bit FNV-1a hash of the
UTF-8 tag.  Both are fully specified below so other implementations can
reproduce the same ids.
"""

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer (bijective on 64-bit integers)."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & MASK64
    return h


@dataclass(frozen=True)
class RngStream:
    """Handle on one reproducible random stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= value <= MASK64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {value!r}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of the stream."""
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index: int) -> "RngStream":
        """Sub-stream ``index`` of this stream (used for per-row / per-direction draws)."""
        return RngStream(self.seed, splitmix64(self.stream_id ^ splitmix64(index)))


def derive_seed(master_seed: int, trial_index: int, purpose: str) -> RngStream:
    """Stream for ``(trial_index, purpose)`` under ``master_seed``."""
    stream_id = splitmix64(splitmix64(trial_index & MASK64) ^ fnv1a64(purpose.encode("utf-8")))
    return RngStream(int(master_seed) & MASK64, stream_id)


def as_stream(rng) -> RngStream:
    """Accept an ``RngStream`` or a plain integer seed."""
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng) & MASK64, 0)
    raise TypeError(f"expected RngStream or int seed, got {type(rng).__name__}")
