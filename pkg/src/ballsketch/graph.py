"""Undirected simple graphs in compressed adjacency form.

Node ids are dense integers 0..n-1. Loading an edge list remaps
arbitrary ids to dense ones and keeps the original ids around; the
loader also drops self-loops and duplicate edges, reporting how many.
A planted-partition generator provides synthetic community-structured
graphs: k equal communities where an expected fraction ``mu`` of each
node's edges leaves its own community.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, InputError

__all__ = [
    "Graph",
    "IngestReport",
    "PlantedPartitionParams",
    "load_edgelist",
    "save_edgelist",
    "generate_planted_partition",
    "degree",
    "neighbors",
]


@dataclass
class IngestReport:
    """What an edge-list loader threw away."""

    duplicates_dropped: int = 0
    self_loops_dropped: int = 0


class Graph:
    """Immutable undirected simple graph (CSR adjacency, sorted neighbor lists)."""

    def __init__(self, indptr: np.ndarray, indices: np.ndarray,
                 original_ids: np.ndarray | None = None,
                 report: IngestReport | None = None):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.original_ids = original_ids
        self.report = report
        self._degrees = np.diff(self.indptr)
        self._edge_u = None
        self._edge_v = None
        self._dir_src = None

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    def degree(self, v: int) -> int:
        self._check_node(v)
        return int(self._degrees[v])

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor ids of ``v`` (a read-only view)."""
        self._check_node(v)
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} out of range for graph with {self.n} nodes")

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical undirected edge arrays (u < v), cached."""
        if self._edge_u is None:
            src = self.directed_src()
            keep = src < self.indices
            self._edge_u = src[keep]
            self._edge_v = self.indices[keep]
        return self._edge_u, self._edge_v

    def directed_src(self) -> np.ndarray:
        """Source endpoint of every directed edge, aligned with ``indices``."""
        if self._dir_src is None:
            self._dir_src = np.repeat(np.arange(self.n, dtype=np.int64), self._degrees)
        return self._dir_src

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def validate(self) -> None:
        """Full-scan check of simplicity, sortedness and adjacency symmetry."""
        src = self.directed_src()
        if np.any(src == self.indices):
            raise InputError("graph contains a self-loop")
        for v in range(self.n):
            nbrs = self.neighbors(v)
            if len(nbrs) > 1 and np.any(np.diff(nbrs) <= 0):
                raise InputError(f"adjacency of node {v} is not strictly sorted")
        fwd = set(zip(src.tolist(), self.indices.tolist()))
        if any((b, a) not in fwd for a, b in fwd):
            raise InputError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, u, v, n: int | None = None,
                   original_ids: np.ndarray | None = None) -> "Graph":
        """Build from endpoint arrays; self-loops and duplicates are dropped.

        Node ids must already be dense in 0..n-1; pass ``n`` explicitly if
        trailing nodes are isolated.
        """
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        if u.shape != v.shape:
            raise InputError("edge endpoint arrays differ in length")
        loops = u == v
        self_loops = int(np.count_nonzero(loops))
        u, v = u[~loops], v[~loops]
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        if n is None:
            n = int(max(lo.max(initial=-1), hi.max(initial=-1)) + 1)
        if len(lo) and (lo.min() < 0 or hi.max() >= n):
            raise InputError("edge endpoint out of range")
        key = lo * np.int64(n) + hi
        unique_key = np.unique(key)
        duplicates = len(key) - len(unique_key)
        lo = unique_key // n
        hi = unique_key % n
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        dst = dst[order]
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(indptr, dst, original_ids=original_ids,
                   report=IngestReport(duplicates, self_loops))


def degree(g: Graph, v: int) -> int:
    return g.degree(v)


def neighbors(g: Graph, v: int) -> np.ndarray:
    return g.neighbors(v)


def _open_source(source):
    if isinstance(source, (str, Path)):
        return open(source, "rb"), True
    if isinstance(source, bytes):
        return io.BytesIO(source), True
    return source, False


def load_edgelist(source) -> Graph:
    """Read a whitespace-separated edge list; '#' lines are comments.

    Node ids are remapped to dense 0..n-1 (the original ids end up in
    ``Graph.original_ids``); duplicate edges and self-loops are dropped
    and counted in ``Graph.report``.
    """
    stream, should_close = _open_source(source)
    us: list[int] = []
    vs: list[int] = []
    try:
        for lineno, raw in enumerate(stream, start=1):
            if isinstance(raw, str):
                raw = raw.encode()
            line = raw.strip()
            if not line or line.startswith(b"#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputError(
                    f"line {lineno}: expected two whitespace-separated node ids, got {len(parts)} tokens"
                )
            try:
                us.append(int(parts[0]))
                vs.append(int(parts[1]))
            except ValueError as exc:
                raise InputError(f"line {lineno}: {exc}") from None
    finally:
        if should_close:
            stream.close()
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    original = np.unique(np.concatenate([u, v])) if len(u) else np.empty(0, dtype=np.int64)
    dense_u = np.searchsorted(original, u)
    dense_v = np.searchsorted(original, v)
    return Graph.from_edges(dense_u, dense_v, n=len(original), original_ids=original)


def save_edgelist(g: Graph, dest) -> None:
    """Write one "u v" line per edge with u < v, in dense-id space."""
    stream, should_close = (open(dest, "w"), True) if isinstance(dest, (str, Path)) else (dest, False)
    try:
        eu, ev = g.edges()
        for a, b in zip(eu.tolist(), ev.tolist()):
            stream.write(f"{a} {b}\n")
    finally:
        if should_close:
            stream.close()


@dataclass(frozen=True)
class PlantedPartitionParams:
    """k equal communities; ``mu`` is the expected share of a node's edges leaving its community."""

    n: int
    k: int
    mean_degree: float
    mu: float
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n <= 0 or self.k <= 0 or self.n % self.k != 0:
            raise ConfigurationError(f"n={self.n} must be a positive multiple of k={self.k}")
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigurationError(f"mixing parameter must be in [0, 1], got {self.mu}")
        if self.mean_degree < 0 or self.mean_degree >= self.n:
            raise ConfigurationError(
                f"mean_degree={self.mean_degree} infeasible for n={self.n}"
            )


def _sample_pairs(rng: np.random.Generator, n_pairs: int, prob: float) -> np.ndarray:
    """Indices of the selected pairs among ``n_pairs`` Bernoulli(prob) draws.

    Small blocks draw every pair; large sparse blocks draw a binomial
    count and then that many positions (duplicates collapse, which loses
    a negligible sliver of density at the rates used here).
    """
    if prob <= 0.0 or n_pairs == 0:
        return np.empty(0, dtype=np.int64)
    if n_pairs <= (1 << 20):
        return np.flatnonzero(rng.random(n_pairs) < prob)
    count = int(rng.binomial(n_pairs, prob))
    if count == 0:
        return np.empty(0, dtype=np.int64)
    return np.unique(rng.integers(0, n_pairs, size=count, dtype=np.int64))


def generate_planted_partition(params: PlantedPartitionParams) -> Graph:
    """Sample a planted-partition graph, deterministic for a fixed rng_seed.

    Intra-community pairs appear with the rate that gives expected
    intra-degree (1-mu)*mean_degree; inter-community pairs with the rate
    giving expected inter-degree mu*mean_degree.
    """
    n, k = params.n, params.k
    s = n // k
    p_in = 0.0 if s <= 1 else min(1.0, (1.0 - params.mu) * params.mean_degree / (s - 1))
    p_out = 0.0 if k == 1 else min(1.0, params.mu * params.mean_degree / (n - s))
    rng = np.random.default_rng(params.rng_seed)
    us: list[np.ndarray] = []
    vs: list[np.ndarray] = []
    iu, iv = np.triu_indices(s, k=1)
    for ci in range(k):
        base_i = ci * s
        chosen = _sample_pairs(rng, len(iu), p_in)
        if len(chosen):
            us.append(base_i + iu[chosen])
            vs.append(base_i + iv[chosen])
        if p_out <= 0:
            continue
        for cj in range(ci + 1, k):
            base_j = cj * s
            chosen = _sample_pairs(rng, s * s, p_out)
            if len(chosen):
                us.append(base_i + chosen // s)
                vs.append(base_j + chosen % s)
    if us:
        u = np.concatenate(us)
        v = np.concatenate(vs)
    else:
        u = np.empty(0, dtype=np.int64)
        v = np.empty(0, dtype=np.int64)
    return Graph.from_edges(u, v, n=n)
