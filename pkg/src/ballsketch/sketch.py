"""HyperLogLog counters with register-wise union.

A counter keeps ``p = 2**b`` one-byte registers; each register stores
the maximum leading-zero rank seen among items routed to it. Distinct
counters built with the same configuration can be merged by taking the
element-wise register maximum, which makes the counter a mergeable
sketch of a set: feeding the union of two item streams produces exactly
the same registers as merging the two counters.

Cardinality is read off via the harmonic-mean estimator with the usual
bias constant, plus an optional linear-counting correction for small
sets (enabled by default, and worth keeping on: radius-0 neighborhoods
of low-degree nodes are exactly the regime where the raw estimator is
biased).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import _hashing
from .errors import ConfigurationError

__all__ = [
    "HllConfig",
    "HllCounter",
    "alpha",
    "estimate_sizes",
]

_SNAPSHOT_MAGIC = b"HLLB"
_SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sBBQB")

# 2**-r lookup for every attainable register value (rank <= 61 for b >= 4).
_POW2_NEG = 2.0 ** -np.arange(65, dtype=np.float64)


@dataclass(frozen=True)
class HllConfig:
    """Counter shape: register-index bits, hash seed, small-range correction."""

    b: int
    hash_seed: int = 0
    small_range_correction: bool = True

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "b", int(self.b))
            object.__setattr__(self, "hash_seed", int(self.hash_seed))
        except (TypeError, ValueError):
            raise ConfigurationError(
                f"register-index bits and hash seed must be integers, got "
                f"({self.b!r}, {self.hash_seed!r})"
            ) from None
        if not 4 <= self.b <= 18:
            raise ConfigurationError(f"register-index bits must be in 4..18, got {self.b!r}")
        if not 0 <= self.hash_seed < (1 << 64):
            raise ConfigurationError("hash_seed must fit in an unsigned 64-bit integer")

    @property
    def p(self) -> int:
        """Number of registers, always a power of two."""
        return 1 << self.b


def alpha(p: int) -> float:
    """Bias-correction constant of the harmonic-mean estimator.

    Only register counts that are powers of two and at least 16 are
    supported; the error-bound constants used elsewhere require p >= 16.
    """
    if p < 16 or p & (p - 1) != 0:
        raise ConfigurationError(f"unsupported register count {p}: need a power of two >= 16")
    if p == 16:
        return 0.673
    if p == 32:
        return 0.697
    if p == 64:
        return 0.709
    return 0.7213 / (1.0 + 1.079 / p)


def estimate_sizes(registers: np.ndarray, config: HllConfig) -> np.ndarray | float:
    """Cardinality estimate for one register vector or a stack of them.

    ``registers`` has shape (p,) or (n, p). Applies linear counting when
    the raw estimate is at most 2.5*p and zero registers remain, unless
    the configuration disables the correction. Rows are processed in
    chunks so the float64 intermediate stays small for large stacks.
    """
    p = config.p
    regs = np.asarray(registers)
    single = regs.ndim == 1
    if single:
        regs = regs[np.newaxis, :]
    est = np.empty(regs.shape[0])
    step = max(1, (64 << 20) // (p * 8))
    for start in range(0, regs.shape[0], step):
        block = regs[start : start + step]
        z = _POW2_NEG[block].sum(axis=1)
        e = alpha(p) * p * p / z
        if config.small_range_correction:
            zeros = np.count_nonzero(block == 0, axis=1)
            small = (e <= 2.5 * p) & (zeros > 0)
            if np.any(small):
                e[small] = p * np.log(p / zeros[small])
        est[start : start + step] = e
    return float(est[0]) if single else est


class HllCounter:
    """One HyperLogLog counter.

    Plain value semantics: safe to hand between threads, safe to read
    concurrently; concurrent mutation of a single counter is the
    caller's problem to serialize.
    """

    __slots__ = ("config", "registers")

    def __init__(self, config: HllConfig, registers: np.ndarray | None = None):
        self.config = config
        if registers is None:
            self.registers = np.zeros(config.p, dtype=np.uint8)
        else:
            registers = np.asarray(registers, dtype=np.uint8)
            if registers.shape != (config.p,):
                raise ConfigurationError(
                    f"register payload has length {registers.shape}, expected ({config.p},)"
                )
            self.registers = registers

    def add(self, item: bytes | str | int) -> None:
        """Add one item.

        Integers hash through the integer mix (matching :meth:`add_batch`);
        byte strings and text hash through keyed blake2b.
        """
        seed = self.config.hash_seed
        if isinstance(item, bool):
            raise TypeError("booleans are not hashable items")
        if isinstance(item, int):
            h = _hashing.hash_ints(item, seed)
        elif isinstance(item, str):
            h = _hashing.hash_bytes(item.encode("utf-8"), seed)
        elif isinstance(item, (bytes, bytearray, memoryview)):
            h = _hashing.hash_bytes(bytes(item), seed)
        else:
            raise TypeError(f"cannot hash item of type {type(item).__name__}")
        idx, rho = _hashing.split_hash(h, self.config.b)
        if rho > self.registers[idx]:
            self.registers[idx] = rho

    def add_batch(self, values) -> None:
        """Add many integer items at once (vectorized)."""
        arr = np.asarray(values, dtype=np.uint64)
        self.add_hashes(_hashing.hash_ints(arr, self.config.hash_seed))

    def add_hashes(self, hashes: np.ndarray) -> None:
        """Fold pre-hashed 64-bit values into the registers."""
        idx, rho = _hashing.split_hash_array(np.asarray(hashes, dtype=np.uint64), self.config.b)
        np.maximum.at(self.registers, idx, rho)

    def merge(self, other: "HllCounter") -> None:
        """Union another counter into this one (element-wise register max)."""
        if other.config != self.config:
            raise ConfigurationError(
                f"cannot merge counters with different configs: {self.config} vs {other.config}"
            )
        np.maximum(self.registers, other.registers, out=self.registers)

    def size(self) -> float:
        """Estimated number of distinct items added so far."""
        return estimate_sizes(self.registers, self.config)

    def copy(self) -> "HllCounter":
        return HllCounter(self.config, self.registers.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, HllCounter):
            return NotImplemented
        return self.config == other.config and bool(
            np.array_equal(self.registers, other.registers)
        )

    def __repr__(self) -> str:
        return f"HllCounter(b={self.config.b}, size~{self.size():.1f})"

    def to_bytes(self) -> bytes:
        """Snapshot: fixed header followed by the p register bytes."""
        header = _HEADER.pack(
            _SNAPSHOT_MAGIC,
            _SNAPSHOT_VERSION,
            self.config.b,
            self.config.hash_seed,
            1 if self.config.small_range_correction else 0,
        )
        return header + self.registers.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "HllCounter":
        """Rebuild a counter from :meth:`to_bytes` output, bit-exact."""
        if len(blob) < _HEADER.size:
            raise ConfigurationError("counter snapshot too short")
        magic, version, b, seed, flag = _HEADER.unpack_from(blob)
        if magic != _SNAPSHOT_MAGIC:
            raise ConfigurationError(f"bad counter snapshot magic {magic!r}")
        if version != _SNAPSHOT_VERSION:
            raise ConfigurationError(f"unsupported counter snapshot version {version}")
        config = HllConfig(b=b, hash_seed=seed, small_range_correction=bool(flag))
        payload = blob[_HEADER.size :]
        if len(payload) != config.p:
            raise ConfigurationError(
                f"counter snapshot payload has {len(payload)} bytes, expected {config.p}"
            )
        return cls(config, np.frombuffer(payload, dtype=np.uint8).copy())

    @property
    def snapshot_size(self) -> int:
        return _HEADER.size + self.config.p
