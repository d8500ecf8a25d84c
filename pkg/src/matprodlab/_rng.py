"""Counter-based random streams.

Every stream is a Philox generator addressed by (key, counter).  Each draw
index owns a fixed range of counter blocks, so the value of draw ``i`` depends
only on (seed, i) — never on how requests were batched or interleaved.  This
is what makes per-trial substreams reproducible under any execution schedule.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Philox

_MASK64 = (1 << 64) - 1
_PHI64 = 0x9E3779B97F4A7C15
_OUTPUTS_PER_BLOCK = 4  # Philox-4x64: one counter increment yields 4 uint64s


def splitmix64(x: int) -> int:
    """One SplitMix64 round; bijective uint64 -> uint64 mixer."""
    x = (x + _PHI64) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def derive_seed(seed: int, *parts: int) -> int:
    """Fold integer tags into a base seed.

    Distinct tag tuples give statistically unrelated streams; the result is
    order-sensitive, so (n, trial) and (trial, n) differ.
    """
    s = splitmix64(seed & _MASK64)
    for p in parts:
        s = splitmix64(s ^ ((int(p) & _MASK64) * _PHI64 & _MASK64))
    return s


def _key(seed: int) -> np.ndarray:
    k0 = splitmix64(seed & _MASK64)
    return np.array([k0, splitmix64(k0)], dtype=np.uint64)


def uniform_block(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniforms in (0, 1) for draw indices start..start+count-1.

    Returns a (count, width) array.  Row r is a pure function of
    (seed, start + r): each index owns ceil(width/4) Philox counter blocks.
    """
    if count <= 0:
        return np.empty((0, width), dtype=np.float64)
    blocks_per_draw = -(-width // _OUTPUTS_PER_BLOCK)
    gen = Philox(key=_key(seed), counter=start * blocks_per_draw)
    raw = gen.random_raw(count * blocks_per_draw * _OUTPUTS_PER_BLOCK)
    raw = raw.reshape(count, blocks_per_draw * _OUTPUTS_PER_BLOCK)[:, :width]
    # (x >> 11) + 0.5 scaled by 2^-53 lands strictly inside (0, 1).
    return ((raw >> np.uint64(11)) + 0.5) * 2.0**-53


def normal_block(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Standard normals via Box-Muller on the uniform stream.

    Consumes a fixed 2*ceil(width/2) uniforms per draw index, keeping the
    per-index counter layout independent of batching.
    """
    pairs = (width + 1) // 2
    u = uniform_block(seed, start, count, 2 * pairs)
    r = np.sqrt(-2.0 * np.log(u[:, 0::2]))
    theta = (2.0 * np.pi) * u[:, 1::2]
    z = np.empty((count, 2 * pairs), dtype=np.float64)
    z[:, 0::2] = r * np.cos(theta)
    z[:, 1::2] = r * np.sin(theta)
    return z[:, :width]


def uniforms_per_normal_draw(width: int) -> int:
    """Counter footprint of one normal_block draw of the given width."""
    return 2 * ((width + 1) // 2)
