"""Counter-based randomness.

Every random draw is a pure function of (seed, stream tag, counters), so any
slice of a Monte Carlo experiment can be recomputed in isolation and parallel
or serial evaluation agree bit for bit. The mixer is the SplitMix64 finaliser
applied to each counter in turn.
"""

from __future__ import annotations

import zlib

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def stream_tag(name: str) -> int:
    """Stable 32-bit tag for a named stream."""
    return zlib.crc32(name.encode())


def hash64(seed: int, tag: int, *counters) -> np.ndarray:
    """Broadcasted 64-bit hash of (seed, tag, counters...)."""
    with np.errstate(over="ignore"):
        h = _mix(np.asarray([(seed & _MASK)], dtype=np.uint64) + _GOLDEN)
        h = _mix(h ^ np.uint64(tag & _MASK))
        for c in counters:
            c = np.asarray(c).astype(np.uint64)
            h = _mix((h ^ c) + _GOLDEN)
    return h


def uniforms(seed: int, tag: int, *counters) -> np.ndarray:
    """Uniform floats in [0, 1) from the top 53 bits of ``hash64``."""
    return (hash64(seed, tag, *counters) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def bernoulli(p: float, seed: int, tag: int, *counters) -> np.ndarray:
    return (uniforms(seed, tag, *counters) < p).astype(np.uint8)


def generator(seed: int, tag: int, *counters) -> np.random.Generator:
    """A numpy Generator whose state is fixed by (seed, tag, counters)."""
    key = int(hash64(seed, tag, *counters)[0])
    return np.random.Generator(np.random.Philox(key=key))
