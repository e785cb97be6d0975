"""Counter propagation over graph neighborhoods.

One HyperLogLog counter per node is seeded with that node's radius-0
items (itself, its incident edges, the triangles or wedges it anchors,
or caller-supplied graphlet ids). Each synchronous round then replaces
every counter with the union of itself and its neighbors' previous
counters, so after round r counter v sketches exactly the item set of
the radius-r ball around v. Sizes are recorded after every round.

Items are hashed through canonical encodings, so the same combinatorial
object inserted at different nodes collides on purpose: a triangle is a
sorted id triple no matter which corner added it, a wedge keeps its
center distinguished but canonicalizes its endpoints, and directed
edges carry a tag distinct from undirected ones.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from . import _hashing, oracle
from .errors import ConfigurationError, InputError
from .graph import Graph
from .sketch import HllConfig, HllCounter, estimate_sizes

__all__ = [
    "BallKind",
    "BallRun",
    "init_counters",
    "count_ball",
    "run",
    "node_item_hashes",
    "edge_item_hashes",
    "out_edge_item_hashes",
    "in_edge_item_hashes",
    "triangle_item_hashes",
    "wedge_item_hashes",
    "graphlet_item_hashes",
    "save_counters",
    "load_counters",
    "BallCardinality",
]

# Type tags keep different item kinds from ever colliding in hash space.
_TAG_NODE = 1
_TAG_EDGE = 2
_TAG_OUT_EDGE = 3
_TAG_IN_EDGE = 4
_TAG_TRIANGLE = 5
_TAG_WEDGE = 6
_TAG_GRAPHLET = 7

# Gather at most this many register bytes per propagation block.
_BLOCK_BYTES = 32 << 20


class BallKind(str, enum.Enum):
    NODE = "node"
    EDGE = "edge"
    OUT_EDGE = "outedge"
    IN_EDGE = "inedge"
    TRIANGLE = "triangle"
    WEDGE = "wedge"
    GRAPHLET = "graphlet"


def as_kind(kind) -> BallKind:
    if isinstance(kind, BallKind):
        return kind
    try:
        return BallKind(str(kind))
    except ValueError:
        raise ConfigurationError(
            f"unknown ball kind {kind!r}; expected one of {[k.value for k in BallKind]}"
        ) from None


def node_item_hashes(nodes, seed: int) -> np.ndarray:
    nodes = np.asarray(nodes, dtype=np.uint64)
    return _hashing.hash_lanes_array(seed, (_TAG_NODE, nodes, 0, 0))


def edge_item_hashes(u, v, seed: int) -> np.ndarray:
    """Undirected edges: endpoints are ordered before hashing."""
    u = np.asarray(u, dtype=np.uint64)
    v = np.asarray(v, dtype=np.uint64)
    return _hashing.hash_lanes_array(seed, (_TAG_EDGE, np.minimum(u, v), np.maximum(u, v), 0))


def out_edge_item_hashes(src, dst, seed: int) -> np.ndarray:
    src = np.asarray(src, dtype=np.uint64)
    dst = np.asarray(dst, dtype=np.uint64)
    return _hashing.hash_lanes_array(seed, (_TAG_OUT_EDGE, src, dst, 0))


def in_edge_item_hashes(src, dst, seed: int) -> np.ndarray:
    src = np.asarray(src, dtype=np.uint64)
    dst = np.asarray(dst, dtype=np.uint64)
    return _hashing.hash_lanes_array(seed, (_TAG_IN_EDGE, src, dst, 0))


def triangle_item_hashes(a, b, c, seed: int) -> np.ndarray:
    """Triangles: the id triple is sorted so all three corners agree."""
    tri = np.stack([np.asarray(a, dtype=np.uint64),
                    np.asarray(b, dtype=np.uint64),
                    np.asarray(c, dtype=np.uint64)], axis=1)
    tri.sort(axis=1)
    return _hashing.hash_lanes_array(seed, (_TAG_TRIANGLE, tri[:, 0], tri[:, 1], tri[:, 2]))


def wedge_item_hashes(center, e1, e2, seed: int) -> np.ndarray:
    """Wedges: center stays distinguished, endpoints are ordered."""
    center = np.asarray(center, dtype=np.uint64)
    e1 = np.asarray(e1, dtype=np.uint64)
    e2 = np.asarray(e2, dtype=np.uint64)
    return _hashing.hash_lanes_array(seed, (_TAG_WEDGE, center, np.minimum(e1, e2), np.maximum(e1, e2)))


def graphlet_item_hashes(ids, seed: int) -> np.ndarray:
    ids = np.asarray(ids, dtype=np.uint64)
    return _hashing.hash_lanes_array(seed, (_TAG_GRAPHLET, ids, 0, 0))


def _normalize_graphlets(g: Graph, graphlets) -> dict[int, np.ndarray]:
    if graphlets is None:
        raise InputError("graphlet runs need per-node item-id lists")
    items: dict[int, np.ndarray] = {}
    pairs = graphlets.items() if hasattr(graphlets, "items") else enumerate(graphlets)
    for v, ids in pairs:
        v = int(v)
        if not 0 <= v < g.n:
            raise InputError(f"graphlet list references unknown node {v}")
        arr = np.asarray(list(ids), dtype=np.int64)
        if len(arr):
            items[v] = arr
    return items


def _initial_pairs(g: Graph, kind: BallKind, seed: int, graphlets=None,
                   triangles: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(owner node, item hash) for every radius-0 insertion."""
    if kind is BallKind.NODE:
        owners = np.arange(g.n, dtype=np.int64)
        return owners, node_item_hashes(owners, seed)
    if kind in (BallKind.EDGE, BallKind.OUT_EDGE, BallKind.IN_EDGE):
        src = g.directed_src()
        dst = g.indices
        if kind is BallKind.EDGE:
            return src, edge_item_hashes(src, dst, seed)
        if kind is BallKind.OUT_EDGE:
            return src, out_edge_item_hashes(src, dst, seed)
        return dst, in_edge_item_hashes(src, dst, seed)
    if kind is BallKind.TRIANGLE:
        if triangles is None:
            triangles = oracle.enumerate_triangles(g)
        if len(triangles) == 0:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.uint64)
        hashes = triangle_item_hashes(triangles[:, 0], triangles[:, 1], triangles[:, 2], seed)
        owners = np.concatenate([triangles[:, 0], triangles[:, 1], triangles[:, 2]])
        return owners, np.tile(hashes, 3)
    if kind is BallKind.WEDGE:
        centers: list[np.ndarray] = []
        left: list[np.ndarray] = []
        right: list[np.ndarray] = []
        for v in range(g.n):
            nbrs = g.neighbors(v)
            d = len(nbrs)
            if d < 2:
                continue
            iu, iv = np.triu_indices(d, k=1)
            centers.append(np.full(len(iu), v, dtype=np.int64))
            left.append(nbrs[iu])
            right.append(nbrs[iv])
        if not centers:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.uint64)
        owners = np.concatenate(centers)
        return owners, wedge_item_hashes(owners, np.concatenate(left), np.concatenate(right), seed)
    if kind is BallKind.GRAPHLET:
        items = _normalize_graphlets(g, graphlets)
        if not items:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.uint64)
        owners = np.concatenate([np.full(len(ids), v, dtype=np.int64) for v, ids in items.items()])
        hashes = graphlet_item_hashes(np.concatenate(list(items.values())), seed)
        return owners, hashes
    raise ConfigurationError(f"unsupported ball kind {kind!r}")


def init_counters(g: Graph, kind, config: HllConfig, graphlets=None,
                  triangles: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Seed one counter per node; returns (register matrix, radius-0 estimates)."""
    kind = as_kind(kind)
    registers = np.zeros((g.n, config.p), dtype=np.uint8)
    owners, hashes = _initial_pairs(g, kind, config.hash_seed, graphlets, triangles)
    if len(owners):
        idx, rho = _hashing.split_hash_array(hashes, config.b)
        np.maximum.at(registers.reshape(-1), owners * np.int64(config.p) + idx, rho)
    return registers, estimate_sizes(registers, config)


@dataclass
class BallRun:
    """Per-node, per-radius cardinality estimates for one ball kind."""

    kind: BallKind
    config: HllConfig
    max_radius: int
    stop_radius: int
    estimates: np.ndarray  # (n, max_radius + 1)
    registers: np.ndarray  # final (n, p) register matrix
    register_history: list[np.ndarray] | None = field(default=None, repr=False)


def _propagate_round(g: Graph, old: np.ndarray, new: np.ndarray) -> None:
    """new[v] = max(old[v], old[w] for w adjacent to v); old is never written.

    Within a round every node reads only the previous buffer and writes
    its own row, so nodes could be processed in parallel; rounds are
    barriers.
    """
    indptr, indices = g.indptr, g.indices
    p = old.shape[1]
    rows_budget = max(1, _BLOCK_BYTES // p)
    v0 = 0
    n = g.n
    while v0 < n:
        v1 = int(np.searchsorted(indptr, indptr[v0] + rows_budget, side="left"))
        v1 = min(max(v1, v0 + 1), n)
        s, e = int(indptr[v0]), int(indptr[v1])
        block_deg = g.degrees[v0:v1]
        nz = np.flatnonzero(block_deg > 0)
        if len(nz) and e > s:
            gathered = old[indices[s:e]]
            starts = (indptr[v0:v1] - s)[nz]
            reduced = np.maximum.reduceat(gathered, starts, axis=0)
            view = new[v0:v1]
            view[nz] = np.maximum(reduced, old[v0:v1][nz])
        v0 = v1


def count_ball(g: Graph, registers: np.ndarray, config: HllConfig, max_radius: int,
               kind=BallKind.NODE, keep_history: bool = False) -> BallRun:
    """Run synchronous union rounds from initialized counters.

    Stops at ``max_radius`` or as soon as a full round changes no
    register, whichever comes first; remaining radii repeat the fixed
    point. ``stop_radius`` records where the registers stabilized (it
    equals ``max_radius`` when no early stop happened).
    """
    kind = as_kind(kind)
    if max_radius < 0:
        raise ConfigurationError("max_radius must be non-negative")
    n = g.n
    estimates = np.zeros((n, max_radius + 1), dtype=np.float64)
    estimates[:, 0] = estimate_sizes(registers, config)
    history: list[np.ndarray] | None = [registers.copy()] if keep_history else None
    old = registers
    stop_radius = max_radius
    for r in range(1, max_radius + 1):
        new = old.copy()
        _propagate_round(g, old, new)
        if np.array_equal(new, old):
            stop_radius = r - 1
            estimates[:, r:] = estimates[:, r - 1 : r]
            if history is not None:
                history.extend(old for _ in range(r, max_radius + 1))
            break
        old = new
        estimates[:, r] = estimate_sizes(old, config)
        if history is not None:
            history.append(old.copy())
    return BallRun(kind=kind, config=config, max_radius=max_radius,
                   stop_radius=stop_radius, estimates=estimates,
                   registers=old, register_history=history)


def run(g: Graph, kind, max_radius: int, config: HllConfig, graphlets=None,
        triangles: np.ndarray | None = None, keep_history: bool = False) -> BallRun:
    """Initialize and propagate in one call; deterministic per (graph, kind, seed)."""
    kind = as_kind(kind)
    registers, _ = init_counters(g, kind, config, graphlets=graphlets, triangles=triangles)
    return count_ball(g, registers, config, max_radius, kind=kind, keep_history=keep_history)


def save_counters(path, registers: np.ndarray, config: HllConfig) -> None:
    """Write a register matrix as back-to-back counter snapshots."""
    with open(path, "wb") as fh:
        for row in registers:
            fh.write(HllCounter(config, row).to_bytes())


def load_counters(path) -> tuple[np.ndarray, HllConfig]:
    """Read a file produced by :func:`save_counters`."""
    blob = Path(path).read_bytes()
    if len(blob) < 15:
        raise InputError("counter file too short")
    record = 15 + (1 << blob[5])  # b lives at byte 5 of every snapshot header
    if len(blob) % record != 0:
        raise InputError("counter file length is not a whole number of snapshots")
    rows = []
    config = None
    for off in range(0, len(blob), record):
        counter = HllCounter.from_bytes(blob[off : off + record])
        if config is None:
            config = counter.config
        elif counter.config != config:
            raise InputError("counter file mixes configurations")
        rows.append(counter.registers)
    return np.stack(rows), config


class BallCardinality(BaseEstimator):
    """Transformer-style front end: fit a graph, get per-node ball-size features.

    ``fit_transform`` returns an (n_nodes, radius + 1) matrix whose column
    r estimates the item count of the radius-r ball around each node.
    """

    def __init__(self, kind: str = "node", radius: int = 2, bits: int = 14,
                 hash_seed: int = 0, small_range_correction: bool = True):
        self.kind = kind
        self.radius = radius
        self.bits = bits
        self.hash_seed = hash_seed
        self.small_range_correction = small_range_correction

    def _config(self) -> HllConfig:
        return HllConfig(b=self.bits, hash_seed=self.hash_seed,
                         small_range_correction=self.small_range_correction)

    def fit(self, X, y=None, graphlets=None):
        from ._validation import as_graph

        g = as_graph(X)
        self.graph_ = g
        self.run_ = run(g, as_kind(self.kind), self.radius, self._config(), graphlets=graphlets)
        self.estimates_ = self.run_.estimates
        self.n_nodes_ = g.n
        return self

    def fit_transform(self, X, y=None, **fit_params) -> np.ndarray:
        return self.fit(X, y=y, **fit_params).estimates_
