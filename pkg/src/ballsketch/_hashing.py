"""Seeded 64-bit hashing used by the sketch counters.

Two families live here: an avalanche mix for machine integers and
fixed-arity integer tuples (vectorizable with numpy, used for graph
items), and a keyed blake2b fallback for arbitrary byte strings.
Scalar and array code paths must agree bit for bit; the tests check
that invariant directly.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(_GOLDEN)
_U_C1 = np.uint64(_C1)
_U_C2 = np.uint64(_C2)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _C1) & MASK64
    x ^= x >> 27
    x = (x * _C2) & MASK64
    x ^= x >> 31
    return x


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 finalizer; operates in place on a uint64 array."""
    x ^= x >> _U30
    x *= _U_C1
    x ^= x >> _U27
    x *= _U_C2
    x ^= x >> _U31
    return x


def seed_state(seed: int) -> int:
    """Initial chaining value derived from a 64-bit seed."""
    return mix64((seed ^ _GOLDEN) & MASK64)


def hash_ints(values: np.ndarray | int, seed: int):
    """Hash integers to uniform 64-bit values. Accepts a scalar or a uint64 array."""
    state = seed_state(seed)
    if isinstance(values, np.ndarray):
        h = values.astype(np.uint64, copy=True)
        h ^= np.uint64(state)
        return mix64_array(h)
    return mix64(state ^ (int(values) & MASK64))


def hash_lanes(seed: int, lanes) -> int:
    """Chain-hash a fixed tuple of integers (scalar path)."""
    h = seed_state(seed)
    for lane in lanes:
        h = mix64(h ^ (int(lane) & MASK64))
    return h


def hash_lanes_array(seed: int, lanes) -> np.ndarray:
    """Chain-hash aligned arrays of integers (vector path).

    ``lanes`` is a sequence of equal-length arrays (or scalars broadcast
    against them); lane ``i`` of every item is consumed in order, exactly
    mirroring :func:`hash_lanes`.
    """
    length = None
    for lane in lanes:
        if isinstance(lane, np.ndarray):
            length = len(lane)
            break
    if length is None:
        raise TypeError("hash_lanes_array needs at least one array lane")
    h = np.full(length, seed_state(seed), dtype=np.uint64)
    for lane in lanes:
        h ^= np.asarray(lane, dtype=np.uint64)
        mix64_array(h)
    return h


def hash_bytes(data: bytes, seed: int) -> int:
    """Keyed blake2b hash of a byte string, reduced to 64 bits."""
    key = (seed & MASK64).to_bytes(8, "little")
    digest = hashlib.blake2b(data, digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def bit_length_u64(w: np.ndarray) -> np.ndarray:
    """Exact bit length of every element of a uint64 array (0 for 0)."""
    w = w.copy()
    w |= w >> np.uint64(1)
    w |= w >> np.uint64(2)
    w |= w >> np.uint64(4)
    w |= w >> np.uint64(8)
    w |= w >> np.uint64(16)
    w |= w >> np.uint64(32)
    return np.bitwise_count(w)


def split_hash(h: int, b: int) -> tuple[int, int]:
    """Split a 64-bit hash into (register index, leading-zero rank).

    The top ``b`` bits select the register; the rank is the position of
    the leftmost 1-bit in the remaining ``64 - b`` bits, with an all-zero
    suffix defined to rank ``(64 - b) + 1`` so the mapping is total.
    """
    width = 64 - b
    idx = h >> width
    w = h & ((1 << width) - 1)
    return idx, width + 1 - w.bit_length()


def split_hash_array(h: np.ndarray, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`split_hash` over a uint64 array."""
    width = 64 - b
    idx = (h >> np.uint64(width)).astype(np.int64)
    w = h & np.uint64((1 << width) - 1)
    rho = (width + 1 - bit_length_u64(w).astype(np.int64)).astype(np.uint8)
    return idx, rho
