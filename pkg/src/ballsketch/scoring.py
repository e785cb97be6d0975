"""Per-node cluster scores assembled from ball-cardinality runs.

Runs the edge/out-edge sketches (for conductance) and the triangle/wedge
sketches (for transitivity) over one graph and turns the cardinality
matrices into per-node, per-radius scores. Also hosts the register-sweep
experiment that measures how estimation error shrinks as registers grow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import estimators, hyperball, oracle
from .errors import ConfigurationError
from .graph import Graph, PlantedPartitionParams, generate_planted_partition
from .hyperball import BallKind
from .sketch import HllConfig

__all__ = [
    "ClusterScores",
    "compute_cluster_scores",
    "ClusterScorer",
    "RegisterSweepRow",
    "register_sweep",
    "exact_conductance_profile",
]

_MEASURES = ("conductance", "triangles", "transitivity")


@dataclass
class ClusterScores:
    """Score matrices indexed [node, radius]; None where not computed."""

    config: HllConfig
    max_radius: int
    edge: np.ndarray | None = None
    out_edge: np.ndarray | None = None
    triangles: np.ndarray | None = None
    wedges: np.ndarray | None = None
    conductance: np.ndarray | None = None
    transitivity: np.ndarray | None = None


def compute_cluster_scores(g: Graph, config: HllConfig, max_radius: int,
                           measures=("conductance", "transitivity"),
                           clamp: bool = False) -> ClusterScores:
    """Run the sketches a score set needs and derive the ratio estimates.

    Conductance rows with a zero out-edge estimate (isolated nodes) and
    transitivity rows with a zero wedge estimate come out as NaN.
    """
    for m in measures:
        if m not in _MEASURES:
            raise ConfigurationError(f"unknown measure {m!r}; expected subset of {_MEASURES}")
    scores = ClusterScores(config=config, max_radius=max_radius)
    if "conductance" in measures:
        scores.edge = hyperball.run(g, BallKind.EDGE, max_radius, config).estimates
        scores.out_edge = hyperball.run(g, BallKind.OUT_EDGE, max_radius, config).estimates
        with np.errstate(divide="ignore", invalid="ignore"):
            phi = 2.0 * scores.edge / scores.out_edge - 1.0
        phi[scores.out_edge <= 0] = np.nan
        if clamp:
            phi = np.clip(phi, 0.0, 1.0)
        scores.conductance = phi
    if "triangles" in measures or "transitivity" in measures:
        triangles = oracle.enumerate_triangles(g)
        scores.triangles = hyperball.run(g, BallKind.TRIANGLE, max_radius, config,
                                         triangles=triangles).estimates
    if "transitivity" in measures:
        scores.wedges = hyperball.run(g, BallKind.WEDGE, max_radius, config).estimates
        with np.errstate(divide="ignore", invalid="ignore"):
            t = 3.0 * scores.triangles / scores.wedges
        t[scores.wedges <= 0] = np.nan
        if clamp:
            t = np.clip(t, 0.0, 1.0)
        scores.transitivity = t
    return scores


class ClusterScorer(BaseEstimator):
    """Graph in, per-node clustering scores out.

    After ``fit`` the score matrices are available as ``conductance_``,
    ``triangles_``, ``wedges_`` and ``transitivity_`` (shape
    (n_nodes, radius + 1)); ``fit_transform`` stacks the requested
    measures into one feature matrix.
    """

    def __init__(self, radius: int = 2, bits: int = 14, hash_seed: int = 0,
                 measures: tuple = ("conductance", "transitivity"), clamp: bool = False):
        self.radius = radius
        self.bits = bits
        self.hash_seed = hash_seed
        self.measures = measures
        self.clamp = clamp

    def fit(self, X, y=None):
        from ._validation import as_graph

        g = as_graph(X)
        scores = compute_cluster_scores(
            g, HllConfig(b=self.bits, hash_seed=self.hash_seed),
            self.radius, measures=self.measures, clamp=self.clamp,
        )
        self.graph_ = g
        self.scores_ = scores
        self.conductance_ = scores.conductance
        self.triangles_ = scores.triangles
        self.wedges_ = scores.wedges
        self.transitivity_ = scores.transitivity
        return self

    def fit_transform(self, X, y=None) -> np.ndarray:
        self.fit(X, y=y)
        blocks = [m for m in (self.conductance_, self.triangles_, self.transitivity_)
                  if m is not None]
        return np.hstack(blocks)


def exact_conductance_profile(g: Graph, max_radius: int) -> np.ndarray:
    """Exact conductance of every radius-r ball, NaN where undefined.

    One BFS per node; boundary and volume per radius come from edge
    incidence scans over the distance labels.
    """
    eu, ev = g.edges()
    deg = g.degrees
    far = np.iinfo(np.int64).max
    out = np.full((g.n, max_radius + 1), np.nan)
    for v in range(g.n):
        dist = oracle.ball_distances(g, v, max_radius=max_radius)
        du = np.where(dist[eu] >= 0, dist[eu], far)
        dv = np.where(dist[ev] >= 0, dist[ev], far)
        lo = np.minimum(du, dv)
        hi = np.maximum(du, dv)
        reached = dist >= 0
        for r in range(max_radius + 1):
            vol = int(deg[reached & (dist <= r)].sum())
            if vol == 0:
                continue
            boundary = int(np.count_nonzero((lo <= r) & (hi > r)))
            out[v, r] = boundary / vol
    return out


@dataclass
class RegisterSweepRow:
    """Aggregates for one register count in the error-scaling experiment."""

    bits: int
    vp_bound: float
    cheb_bound: float
    mean_error: float
    var_error: float
    mean_abs_error: float
    nodes: int


def register_sweep(params: PlantedPartitionParams, bits_list, trials: int,
                   radius: int = 1, confidence: float = 0.95,
                   hash_seed: int = 0) -> list[RegisterSweepRow]:
    """Measure conductance-estimation error across register counts.

    For each register count, ``trials`` fresh planted-partition graphs are
    scored at the given radius and compared against exact conductance.
    Reported bounds are mean interval half-widths at the target confidence
    (plug-in cardinalities); errors are estimate minus truth.
    """
    rows = []
    for b in bits_list:
        errors: list[np.ndarray] = []
        vp_halves: list[np.ndarray] = []
        cheb_halves: list[np.ndarray] = []
        for trial in range(trials):
            g = generate_planted_partition(
                PlantedPartitionParams(params.n, params.k, params.mean_degree,
                                       params.mu, params.rng_seed + trial)
            )
            config = HllConfig(b=b, hash_seed=hash_seed + trial)
            scores = compute_cluster_scores(g, config, radius, measures=("conductance",))
            exact = exact_conductance_profile(g, radius)[:, radius]
            est = scores.conductance[:, radius]
            ok = ~(np.isnan(est) | np.isnan(exact))
            errors.append(est[ok] - exact[ok])
            e_card = scores.edge[ok, radius]
            o_card = scores.out_edge[ok, radius]
            p = config.p
            vp_half = np.empty(int(ok.sum()))
            cheb_half = np.empty(int(ok.sum()))
            for i, (ec, oc, phi) in enumerate(zip(e_card, o_card, est[ok])):
                l1, l2 = estimators.ratio_widths_for_confidence(confidence, ec, oc, p, "vp")
                ivp = estimators.vp_conductance_interval(ec, oc, phi, p, l1, l2, plug_in=True)
                p1, p2 = estimators.ratio_widths_for_confidence(confidence, ec, oc, p, "chebyshev")
                ich = estimators.chebyshev_conductance_interval(ec, oc, phi, p, p1, p2, plug_in=True)
                vp_half[i] = (ivp.hi - ivp.lo) / 2.0 if np.isfinite(ivp.hi) else np.inf
                cheb_half[i] = (ich.hi - ich.lo) / 2.0 if np.isfinite(ich.hi) else np.inf
            vp_halves.append(vp_half)
            cheb_halves.append(cheb_half)
        err = np.concatenate(errors)
        rows.append(RegisterSweepRow(
            bits=b,
            vp_bound=float(np.mean(np.concatenate(vp_halves))),
            cheb_bound=float(np.mean(np.concatenate(cheb_halves))),
            mean_error=float(err.mean()),
            var_error=float(err.var(ddof=1)),
            mean_abs_error=float(np.abs(err).mean()),
            nodes=len(err),
        ))
    return rows
