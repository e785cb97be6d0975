"""Exact brute-force ground truth for everything the sketches estimate.

Every function here is definitional: balls come from BFS, edge counts
from incidence scans over the raw edge arrays, triangles from an
ordered neighbor-intersection enumeration. Slow on purpose at large
radii; intended for desk-scale graphs (a few thousand nodes) where the
probabilistic estimates can be checked against the truth.

Two semantics exist for triangles and wedges relative to a ball: the
propagation algorithms count triangles *touching* the ball and wedges
*centered* in it, while the transitivity of the ball subgraph uses
triangles and wedges lying *fully inside*. Both are provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import UndefinedValueError
from .graph import Graph

__all__ = [
    "BallSet",
    "ball_distances",
    "exact_ball",
    "exact_edgeball",
    "exact_out_edgeball",
    "exact_in_edgeball",
    "exact_boundary",
    "exact_conductance",
    "enumerate_triangles",
    "enumerate_wedges_at",
    "exact_triangles_touching_ball",
    "exact_wedges_centered_in_ball",
    "exact_triangles_inside",
    "exact_wedges_inside",
    "exact_transitivity",
]


@dataclass(frozen=True)
class BallSet:
    """All nodes within graph distance ``radius`` of ``center``."""

    center: int
    radius: int
    members: frozenset[int]


def ball_distances(g: Graph, v: int, max_radius: int | None = None) -> np.ndarray:
    """BFS distances from ``v``: -1 marks nodes beyond ``max_radius`` (or unreachable)."""
    g._check_node(v)
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[v] = 0
    frontier = np.array([v], dtype=np.int64)
    level = 0
    while len(frontier) and (max_radius is None or level < max_radius):
        level += 1
        neigh = np.concatenate(
            [g.indices[g.indptr[u]:g.indptr[u + 1]] for u in frontier.tolist()]
        )
        fresh = np.unique(neigh)
        fresh = fresh[dist[fresh] < 0]
        dist[fresh] = level
        frontier = fresh
    return dist


def _ball_mask(g: Graph, v: int, r: int) -> np.ndarray:
    if r < 0:
        raise ValueError("radius must be non-negative")
    dist = ball_distances(g, v, max_radius=r)
    return dist >= 0


def _as_mask(g: Graph, S) -> np.ndarray:
    if isinstance(S, BallSet):
        S = S.members
    if isinstance(S, np.ndarray) and S.dtype == bool:
        if S.shape != (g.n,):
            raise ValueError("boolean mask has wrong length")
        return S
    ids = np.asarray(sorted(S) if isinstance(S, (set, frozenset)) else S, dtype=np.int64)
    mask = np.zeros(g.n, dtype=bool)
    if len(ids):
        if ids.min() < 0 or ids.max() >= g.n:
            raise IndexError("node id out of range in node set")
        mask[ids] = True
    return mask


def exact_ball(g: Graph, v: int, r: int) -> BallSet:
    mask = _ball_mask(g, v, r)
    return BallSet(center=v, radius=r, members=frozenset(np.flatnonzero(mask).tolist()))


def exact_edgeball(g: Graph, v: int, r: int) -> int:
    """Number of undirected edges with at least one endpoint in the ball."""
    mask = _ball_mask(g, v, r)
    eu, ev = g.edges()
    return int(np.count_nonzero(mask[eu] | mask[ev]))


def exact_out_edgeball(g: Graph, v: int, r: int) -> int:
    """Directed-view count of edges leaving ball members (one per incidence)."""
    mask = _ball_mask(g, v, r)
    return int(np.count_nonzero(mask[g.directed_src()]))


def exact_in_edgeball(g: Graph, v: int, r: int) -> int:
    """Directed-view count of edges entering ball members."""
    mask = _ball_mask(g, v, r)
    return int(np.count_nonzero(mask[g.indices]))


def exact_boundary(g: Graph, S) -> int:
    """Number of edges with exactly one endpoint in S."""
    mask = _as_mask(g, S)
    eu, ev = g.edges()
    return int(np.count_nonzero(mask[eu] ^ mask[ev]))


def exact_conductance(g: Graph, S, full: bool = False) -> float:
    """Boundary over volume; with ``full=True`` the denominator is
    min(vol(S), 2m - vol(S)) instead of vol(S)."""
    mask = _as_mask(g, S)
    if not mask.any():
        raise UndefinedValueError("conductance of an empty set is undefined")
    vol = int(g.degrees[mask].sum())
    denom = min(vol, 2 * g.m - vol) if full else vol
    if denom == 0:
        raise UndefinedValueError("conductance undefined: zero volume")
    return exact_boundary(g, mask) / denom


def enumerate_triangles(g: Graph) -> np.ndarray:
    """All triangles as canonical (a < b < c) rows, lexicographically sorted.

    Forward-style enumeration: neighbors are ranked by (degree, id) and
    each triangle is found exactly once at its two lowest-ranked corners.
    """
    order = np.lexsort((np.arange(g.n), g.degrees))
    rank = np.empty(g.n, dtype=np.int64)
    rank[order] = np.arange(g.n)
    higher: list[np.ndarray] = []
    for v in range(g.n):
        nbrs = g.neighbors(v)
        fwd = nbrs[rank[nbrs] > rank[v]]
        higher.append(np.sort(rank[fwd]))
    rows: list[tuple[int, int, int]] = []
    inv = order  # rank -> node id
    for v in range(g.n):
        fv = higher[v]
        for ru in fv.tolist():
            u = inv[ru]
            common = np.intersect1d(fv, higher[u], assume_unique=True)
            for rw in common.tolist():
                tri = sorted((v, int(u), int(inv[rw])))
                rows.append((tri[0], tri[1], tri[2]))
    if not rows:
        return np.empty((0, 3), dtype=np.int64)
    arr = np.asarray(rows, dtype=np.int64)
    return arr[np.lexsort((arr[:, 2], arr[:, 1], arr[:, 0]))]


def enumerate_wedges_at(g: Graph, v: int) -> int:
    """Number of wedges centered at ``v``: one per unordered neighbor pair."""
    return comb(g.degree(v), 2)


def exact_triangles_touching_ball(g: Graph, v: int, r: int,
                                  triangles: np.ndarray | None = None) -> int:
    """Distinct triangles with at least one corner in the ball."""
    if triangles is None:
        triangles = enumerate_triangles(g)
    if len(triangles) == 0:
        return 0
    mask = _ball_mask(g, v, r)
    return int(np.count_nonzero(mask[triangles[:, 0]] | mask[triangles[:, 1]] | mask[triangles[:, 2]]))


def exact_wedges_centered_in_ball(g: Graph, v: int, r: int) -> int:
    """Distinct wedges whose center node lies in the ball (endpoints may not)."""
    mask = _ball_mask(g, v, r)
    deg = g.degrees[mask]
    return int((deg * (deg - 1) // 2).sum())


def exact_triangles_inside(g: Graph, S, triangles: np.ndarray | None = None) -> int:
    """Triangles with all three corners in S."""
    if triangles is None:
        triangles = enumerate_triangles(g)
    if len(triangles) == 0:
        return 0
    mask = _as_mask(g, S)
    return int(np.count_nonzero(mask[triangles[:, 0]] & mask[triangles[:, 1]] & mask[triangles[:, 2]]))


def exact_wedges_inside(g: Graph, S) -> int:
    """Wedges with center and both endpoints in S."""
    mask = _as_mask(g, S)
    total = 0
    for v in np.flatnonzero(mask).tolist():
        inside = int(np.count_nonzero(mask[g.neighbors(v)]))
        total += inside * (inside - 1) // 2
    return total


def exact_transitivity(g: Graph, S, triangles: np.ndarray | None = None) -> float:
    """3 * triangles / wedges on the subgraph induced by S."""
    wedges = exact_wedges_inside(g, S)
    if wedges == 0:
        raise UndefinedValueError("transitivity undefined: induced subgraph has no wedges")
    return 3.0 * exact_triangles_inside(g, S, triangles) / wedges
