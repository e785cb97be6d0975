import io

import numpy as np
import pytest

from ballsketch import (
    ConfigurationError,
    Graph,
    InputError,
    PlantedPartitionParams,
    generate_planted_partition,
    load_edgelist,
    save_edgelist,
)
from ballsketch.graph import degree, neighbors

from conftest import complete_graph, path_graph, star_graph


def test_load_simple_path():
    g = load_edgelist(b"0 1\n1 2\n")
    assert g.n == 3
    assert g.m == 2
    assert g.degree(1) == 2


def test_load_remaps_and_reports_drops():
    g = load_edgelist(b"# c\n5 9\n9 5\n5 5\n")
    assert g.n == 2
    assert g.m == 1
    assert list(g.original_ids) == [5, 9]
    assert g.report.duplicates_dropped == 1
    assert g.report.self_loops_dropped == 1
    assert g.has_edge(0, 1)


def test_load_rejects_malformed_line_with_number():
    with pytest.raises(InputError, match="line 2"):
        load_edgelist(b"0 1\n0 x\n")
    with pytest.raises(InputError, match="line 3"):
        load_edgelist(b"0 1\n\n1 2 3\n")


def test_save_then_load_is_identity():
    g = load_edgelist(b"0 3\n3 2\n2 0\n1 0\n")
    buf = io.StringIO()
    save_edgelist(g, buf)
    back = load_edgelist(buf.getvalue().encode())
    assert back.n == g.n
    assert np.array_equal(back.indptr, g.indptr)
    assert np.array_equal(back.indices, g.indices)


def test_degree_and_neighbors_examples():
    path = path_graph(3)
    assert degree(path, 1) == 2
    k4 = complete_graph(4)
    assert all(degree(k4, v) == 3 for v in range(4))
    star = star_graph(5)
    assert len(neighbors(star, 0)) == 5
    assert list(neighbors(star, 1)) == [0]


def test_node_out_of_range_raises_index_error():
    g = path_graph(3)
    with pytest.raises(IndexError):
        g.degree(3)
    with pytest.raises(IndexError):
        g.neighbors(-1)


def test_adjacency_is_symmetric_and_degree_sum_is_2m():
    g = generate_planted_partition(PlantedPartitionParams(200, 4, 6.0, 0.2, rng_seed=9))
    g.validate()
    assert int(g.degrees.sum()) == 2 * g.m


def test_from_edges_requires_matching_lengths():
    with pytest.raises(InputError):
        Graph.from_edges([0, 1], [1])


def test_planted_partition_is_deterministic():
    params = PlantedPartitionParams(120, 6, 5.0, 0.25, rng_seed=42)
    a = generate_planted_partition(params)
    b = generate_planted_partition(params)
    assert np.array_equal(a.indptr, b.indptr)
    assert np.array_equal(a.indices, b.indices)
    c = generate_planted_partition(PlantedPartitionParams(120, 6, 5.0, 0.25, rng_seed=43))
    assert not np.array_equal(a.indices, c.indices)


def test_mu_zero_produces_no_intercommunity_edges():
    g = generate_planted_partition(PlantedPartitionParams(100, 10, 4.0, 0.0, rng_seed=1))
    eu, ev = g.edges()
    assert (eu // 10 == ev // 10).all()


def test_single_community_mean_degree():
    vals = []
    for seed in range(20):
        g = generate_planted_partition(PlantedPartitionParams(100, 1, 10.0, 0.0, rng_seed=seed))
        vals.append(2 * g.m / g.n)
    mean_deg = float(np.mean(vals))
    assert abs(mean_deg - 10.0) <= 2.0


def test_mixing_parameter_controls_endpoint_fraction():
    inter = 0
    total = 0
    for seed in range(20):
        g = generate_planted_partition(PlantedPartitionParams(1000, 10, 10.0, 0.3, rng_seed=seed))
        eu, ev = g.edges()
        cross = (eu // 100) != (ev // 100)
        inter += int(cross.sum())
        total += len(eu)
    frac = inter / total
    assert 0.25 <= frac <= 0.35


def test_infeasible_parameters_rejected():
    with pytest.raises(ConfigurationError):
        PlantedPartitionParams(100, 3, 5.0, 0.2)  # n not divisible by k
    with pytest.raises(ConfigurationError):
        PlantedPartitionParams(100, 10, 100.0, 0.2)  # mean degree >= n
    with pytest.raises(ConfigurationError):
        PlantedPartitionParams(100, 10, 5.0, 1.5)  # mu out of range


def test_load_accepts_file_path(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n# comment\n2 3\n")
    g = load_edgelist(p)
    assert g.n == 4
    assert g.m == 3
