import numpy as np
import pytest

from ballsketch import HllConfig
from ballsketch.graph import Graph
from ballsketch import hyperball, oracle


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi style random graph for tests."""
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph.from_edges(iu[keep], iv[keep], n=n)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(np.arange(n - 1), np.arange(1, n), n=n)


def complete_graph(n: int) -> Graph:
    iu, iv = np.triu_indices(n, k=1)
    return Graph.from_edges(iu, iv, n=n)


def star_graph(leaves: int) -> Graph:
    """Hub is node 0."""
    return Graph.from_edges(np.zeros(leaves, dtype=np.int64),
                            np.arange(1, leaves + 1), n=leaves + 1)


def cycle_graph(n: int) -> Graph:
    u = np.arange(n)
    return Graph.from_edges(u, (u + 1) % n, n=n)


def node_item_table(g: Graph, kind: hyperball.BallKind, config: HllConfig,
                    graphlets=None) -> list[np.ndarray]:
    """Radius-0 item hashes per node, built directly from graph structure.

    This is the oracle-side construction for the propagation-equivalence
    checks: it uses only the public item encoders plus adjacency, never
    the propagation engine.
    """
    seed = config.hash_seed
    table: list[np.ndarray] = []
    triangles = oracle.enumerate_triangles(g) if kind is hyperball.BallKind.TRIANGLE else None
    for v in range(g.n):
        nbrs = g.neighbors(v)
        if kind is hyperball.BallKind.NODE:
            h = hyperball.node_item_hashes([v], seed)
        elif kind is hyperball.BallKind.EDGE:
            h = hyperball.edge_item_hashes(np.full(len(nbrs), v), nbrs, seed)
        elif kind is hyperball.BallKind.OUT_EDGE:
            h = hyperball.out_edge_item_hashes(np.full(len(nbrs), v), nbrs, seed)
        elif kind is hyperball.BallKind.IN_EDGE:
            h = hyperball.in_edge_item_hashes(nbrs, np.full(len(nbrs), v), seed)
        elif kind is hyperball.BallKind.TRIANGLE:
            mine = triangles[(triangles == v).any(axis=1)]
            h = (hyperball.triangle_item_hashes(mine[:, 0], mine[:, 1], mine[:, 2], seed)
                 if len(mine) else np.empty(0, dtype=np.uint64))
        elif kind is hyperball.BallKind.WEDGE:
            if len(nbrs) >= 2:
                iu, iv = np.triu_indices(len(nbrs), k=1)
                h = hyperball.wedge_item_hashes(np.full(len(iu), v), nbrs[iu], nbrs[iv], seed)
            else:
                h = np.empty(0, dtype=np.uint64)
        elif kind is hyperball.BallKind.GRAPHLET:
            ids = graphlets.get(v, []) if graphlets else []
            h = (hyperball.graphlet_item_hashes(np.asarray(ids), seed)
                 if len(ids) else np.empty(0, dtype=np.uint64))
        else:
            raise AssertionError(kind)
        table.append(h)
    return table


def registers_from_hashes(config: HllConfig, hashes: np.ndarray) -> np.ndarray:
    from ballsketch.sketch import HllCounter

    c = HllCounter(config)
    if len(hashes):
        c.add_hashes(hashes)
    return c.registers


def assert_propagation_matches_oracle(g: Graph, kind, config: HllConfig,
                                      max_radius: int, graphlets=None) -> None:
    """Propagated registers must equal a fresh counter fed the exact item set."""
    kind = hyperball.as_kind(kind)
    ball_run = hyperball.run(g, kind, max_radius, config, graphlets=graphlets,
                             keep_history=True)
    table = node_item_table(g, kind, config, graphlets=graphlets)
    for v in range(g.n):
        dist = oracle.ball_distances(g, v, max_radius=max_radius)
        for r in range(max_radius + 1):
            members = np.flatnonzero((dist >= 0) & (dist <= r))
            hashes = (np.concatenate([table[x] for x in members.tolist()])
                      if len(members) else np.empty(0, dtype=np.uint64))
            expected = registers_from_hashes(config, hashes)
            got = ball_run.register_history[r][v]
            assert np.array_equal(got, expected), (
                f"registers differ: kind={kind}, node={v}, radius={r}"
            )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
