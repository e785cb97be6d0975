"""Seed selection and local community detection.

Seeds are picked from per-node cluster scores (lowest ball conductance,
most triangles, highest transitivity) or from degree/randomness as
baselines. Each seed is expanded with the push procedure for
approximate personalized PageRank, followed by a sweep cut: order the
support by degree-normalized mass and keep the prefix with the lowest
conductance.

``alpha`` is the restart probability of the push process: every push
moves an ``alpha`` fraction of a node's residual into its mass and
spreads the rest over its neighbors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ConfigurationError, InputError
from .graph import Graph
from .scoring import ClusterScores

__all__ = [
    "SeedCriterion",
    "PprConfig",
    "PprResult",
    "SweepResult",
    "SeedSetSummary",
    "select_seeds",
    "approximate_pagerank",
    "sweep_cut",
    "pagerank_nibble",
    "evaluate_seed_sets",
    "PageRankNibble",
]

_SCORE_CRITERIA = ("phi_min", "triangle_max", "transitivity_max")
_CRITERIA = _SCORE_CRITERIA + ("degree_max", "random")


@dataclass(frozen=True)
class SeedCriterion:
    """How to rank nodes when picking seeds.

    ``radius`` applies to the score-based criteria and must be one of
    {0, 1, 2}; ``rng_seed`` only matters for ``random``.
    """

    kind: str
    radius: int | None = None
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in _CRITERIA:
            raise ConfigurationError(f"unknown seed criterion {self.kind!r}; expected one of {_CRITERIA}")
        if self.kind in _SCORE_CRITERIA:
            if self.radius is None or not 0 <= self.radius <= 2:
                raise ConfigurationError(
                    f"criterion {self.kind!r} needs a radius in {{0, 1, 2}}, got {self.radius}"
                )


def select_seeds(scores: ClusterScores | None, g: Graph, criterion: SeedCriterion,
                 k: int) -> np.ndarray:
    """Top-k nodes under a criterion; ties break toward the smaller node id.

    NaN scores rank last. Deterministic for everything except ``random``,
    which uses its own rng seed.
    """
    if k < 0 or k > g.n:
        raise InputError(f"cannot select {k} seeds from {g.n} nodes")
    ids = np.arange(g.n)
    if criterion.kind == "random":
        rng = np.random.default_rng(criterion.rng_seed)
        return rng.permutation(g.n)[:k]
    if criterion.kind == "degree_max":
        order = np.lexsort((ids, -g.degrees))
        return order[:k]
    if scores is None:
        raise InputError(f"criterion {criterion.kind!r} needs cluster scores")
    table = {
        "phi_min": (scores.conductance, 1.0),
        "triangle_max": (scores.triangles, -1.0),
        "transitivity_max": (scores.transitivity, -1.0),
    }
    matrix, sign = table[criterion.kind]
    if matrix is None:
        raise InputError(f"scores lack the measure needed by {criterion.kind!r}")
    if criterion.radius > scores.max_radius:
        raise InputError(
            f"scores cover radii 0..{scores.max_radius}, criterion asks for {criterion.radius}"
        )
    column = matrix[:, criterion.radius].astype(float)
    key = sign * column
    key[np.isnan(column)] = np.inf
    order = np.lexsort((ids, key))
    return order[:k]


@dataclass(frozen=True)
class PprConfig:
    """Push parameters: restart probability, residual tolerance, sweep cap."""

    alpha: float = 0.85
    epsilon: float = 1e-8
    max_cut_size: int = 200

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.epsilon <= 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_cut_size < 1:
            raise ConfigurationError(f"max_cut_size must be at least 1, got {self.max_cut_size}")


@dataclass
class PprResult:
    """Approximate personalized PageRank mass and leftover residual."""

    seed: int
    mass: np.ndarray
    residual: np.ndarray
    degenerate: bool = False
    pushes: int = 0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.mass > 0)

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())


def approximate_pagerank(g: Graph, seed: int, cfg: PprConfig) -> PprResult:
    """Push procedure: terminates with residual(v) < epsilon * degree(v) everywhere.

    An isolated seed gets unit mass and a degenerate flag instead of a
    diverging push.
    """
    g._check_node(seed)
    n = g.n
    mass = np.zeros(n)
    residual = np.zeros(n)
    if g.degrees[seed] == 0:
        mass[seed] = 1.0
        return PprResult(seed=seed, mass=mass, residual=residual, degenerate=True)
    residual[seed] = 1.0
    thresholds = cfg.epsilon * g.degrees
    queue: deque[int] = deque([seed])
    queued = np.zeros(n, dtype=bool)
    queued[seed] = True
    indptr, indices = g.indptr, g.indices
    pushes = 0
    spread = 1.0 - cfg.alpha
    while queue:
        u = queue.popleft()
        queued[u] = False
        ru = residual[u]
        if ru < thresholds[u]:
            continue
        mass[u] += cfg.alpha * ru
        residual[u] = 0.0
        nbrs = indices[indptr[u]:indptr[u + 1]]
        residual[nbrs] += spread * ru / len(nbrs)
        hot = nbrs[(residual[nbrs] >= thresholds[nbrs]) & ~queued[nbrs]]
        if len(hot):
            queued[hot] = True
            queue.extend(hot.tolist())
        pushes += 1
    return PprResult(seed=seed, mass=mass, residual=residual, pushes=pushes)


@dataclass
class SweepResult:
    """Outcome of a conductance sweep over a mass vector's support."""

    seed: int
    order: np.ndarray
    best_size: int
    best_conductance: float
    conductance_curve: np.ndarray
    degenerate: bool = False

    @property
    def best_set(self) -> np.ndarray:
        return self.order[: self.best_size]


def sweep_cut(g: Graph, ppr: PprResult, cfg: PprConfig) -> SweepResult:
    """Evaluate conductance of every mass-ordered prefix up to the cut cap.

    Nodes are ordered by mass / degree descending (ties toward smaller id);
    the returned prefix minimizes conductance among prefixes of size at
    most ``max_cut_size``.
    """
    support = ppr.support
    if len(support) == 0:
        raise InputError("sweep cut needs at least one node with positive mass")
    deg = g.degrees[support]
    if ppr.degenerate or not deg.all():
        # Zero-degree support: conductance of the prefix is undefined.
        order = support
        return SweepResult(seed=ppr.seed, order=order, best_size=1,
                           best_conductance=float("nan"),
                           conductance_curve=np.full(1, np.nan), degenerate=True)
    ratio = ppr.mass[support] / deg
    order = support[np.lexsort((support, -ratio))]
    limit = min(len(order), cfg.max_cut_size)
    in_set = np.zeros(g.n, dtype=bool)
    curve = np.empty(limit)
    vol = 0
    cut = 0
    indptr, indices = g.indptr, g.indices
    for i, v in enumerate(order[:limit].tolist()):
        in_set[v] = True
        nbrs = indices[indptr[v]:indptr[v + 1]]
        inside = int(np.count_nonzero(in_set[nbrs]))
        vol += len(nbrs)
        cut += len(nbrs) - 2 * inside
        curve[i] = cut / vol
    best = int(np.argmin(curve))
    return SweepResult(seed=ppr.seed, order=order, best_size=best + 1,
                       best_conductance=float(curve[best]), conductance_curve=curve)


def pagerank_nibble(g: Graph, seed: int, cfg: PprConfig) -> SweepResult:
    """Push from one seed, then sweep."""
    return sweep_cut(g, approximate_pagerank(g, seed, cfg), cfg)


@dataclass
class SeedSetSummary:
    """Conductance distribution of the communities found from one seed set."""

    name: str
    conductances: np.ndarray
    results: list[SweepResult] = field(repr=False, default_factory=list)

    @property
    def quartiles(self) -> tuple[float, float, float, float, float]:
        vals = self.conductances[~np.isnan(self.conductances)]
        if len(vals) == 0:
            nan = float("nan")
            return (nan, nan, nan, nan, nan)
        q = np.percentile(vals, [0, 25, 50, 75, 100])
        return tuple(float(x) for x in q)

    @property
    def median(self) -> float:
        return self.quartiles[2]


def evaluate_seed_sets(g: Graph, seed_sets, cfg: PprConfig) -> list[SeedSetSummary]:
    """Run the nibble pipeline for every seed of every set.

    ``seed_sets`` maps set names to node lists. Sweeps from different
    seeds are independent; overlapping discovered sets are not merged.
    """
    summaries = []
    for name, seeds in seed_sets.items():
        results = [pagerank_nibble(g, int(s), cfg) for s in seeds]
        conductances = np.asarray([r.best_conductance for r in results])
        summaries.append(SeedSetSummary(name=name, conductances=conductances, results=results))
    return summaries


class PageRankNibble(BaseEstimator):
    """Estimator-style wrapper around the push + sweep pipeline.

    ``fit(X, seeds=[...])`` expands every seed; results land in
    ``results_`` with the per-seed best conductances in ``conductances_``.
    """

    def __init__(self, alpha: float = 0.85, epsilon: float = 1e-8, max_cut_size: int = 200):
        self.alpha = alpha
        self.epsilon = epsilon
        self.max_cut_size = max_cut_size

    def _config(self) -> PprConfig:
        return PprConfig(alpha=self.alpha, epsilon=self.epsilon, max_cut_size=self.max_cut_size)

    def fit(self, X, y=None, seeds=None):
        from ._validation import as_graph

        if seeds is None:
            raise InputError("PageRankNibble.fit needs seeds")
        g = as_graph(X)
        cfg = self._config()
        self.graph_ = g
        self.results_ = [pagerank_nibble(g, int(s), cfg) for s in seeds]
        self.conductances_ = np.asarray([r.best_conductance for r in self.results_])
        return self

    def fit_predict(self, X, y=None, seeds=None) -> np.ndarray:
        """Membership mask of the best community of the first seed."""
        self.fit(X, seeds=seeds)
        labels = np.full(self.graph_.n, -1, dtype=np.int64)
        for i, res in enumerate(self.results_):
            chosen = res.best_set
            labels[chosen[labels[chosen] == -1]] = i
        return labels
