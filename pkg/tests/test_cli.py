import json

import numpy as np
import pytest

from ballsketch import HllConfig, load_edgelist, run
from ballsketch.cli import main

from conftest import star_graph


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.txt"
    code = main(["gen", "--n", "60", "--k", "3", "--mu", "0.2", "--mean-degree", "6",
                 "--seed", "5", "--out", str(path)])
    assert code == 0
    return path


def _read(path):
    return path.read_text().splitlines()


def test_gen_is_deterministic(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    assert main(["gen", "--n", "40", "--k", "2", "--mu", "0.1", "--mean-degree", "4",
                 "--seed", "9", "--out", str(a)]) == 0
    assert main(["gen", "--n", "40", "--k", "2", "--mu", "0.1", "--mean-degree", "4",
                 "--seed", "9", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    g = load_edgelist(a)  # isolated nodes cannot appear in an edge list
    assert 0 < g.n <= 40
    assert g.m > 0


def test_balls_matches_library_run(tmp_path, graph_file):
    out = tmp_path / "balls.csv"
    assert main(["balls", "--graph", str(graph_file), "--kind", "edge", "--radius", "1",
                 "--bits", "8", "--hash-seed", "4", "--out", str(out)]) == 0
    lines = _read(out)
    assert lines[0] == "node,radius,estimate"
    g = load_edgelist(graph_file)
    ball_run = run(g, "edge", 1, HllConfig(b=8, hash_seed=4))
    row0 = lines[1].split(",")
    assert float(row0[2]) == pytest.approx(ball_run.estimates[0, 0])
    assert len(lines) == 1 + 2 * g.n


def test_balls_snapshot_dir(tmp_path, graph_file):
    snap = tmp_path / "snaps"
    out = tmp_path / "o.csv"
    assert main(["balls", "--graph", str(graph_file), "--kind", "node", "--radius", "2",
                 "--bits", "6", "--out", str(out), "--snapshot-dir", str(snap)]) == 0
    files = sorted(p.name for p in snap.iterdir())
    assert files == ["round_0.hllb", "round_1.hllb", "round_2.hllb"]
    from ballsketch.hyperball import load_counters

    registers, cfg = load_counters(snap / "round_0.hllb")
    assert registers.shape == (60, 64)
    assert cfg.b == 6


def test_graphlet_balls_via_file(tmp_path, graph_file):
    glf = tmp_path / "g.graphlets"
    glf.write_text("0 11 12\n3 99\n")
    out = tmp_path / "o.csv"
    assert main(["balls", "--graph", str(graph_file), "--kind", "graphlet",
                 "--radius", "1", "--bits", "6", "--graphlets", str(glf),
                 "--out", str(out)]) == 0
    assert main(["balls", "--graph", str(graph_file), "--kind", "graphlet",
                 "--radius", "1", "--bits", "6", "--out", str(out)]) == 2


def test_conductance_with_oracle_columns(tmp_path, graph_file):
    out = tmp_path / "cond.csv"
    assert main(["conductance", "--graph", str(graph_file), "--radius", "1",
                 "--bits", "10", "--oracle", "--out", str(out)]) == 0
    lines = _read(out)
    assert lines[0] == "node,radius,estimate,exact,cheb_lo,cheb_hi,vp_lo,vp_hi,confidence,plug_in_flag"
    cells = lines[1].split(",")
    assert cells[0] == "0" and cells[1] == "0"
    est, exact = float(cells[2]), float(cells[3])
    assert abs(est - exact) < 0.5
    assert float(cells[4]) <= est <= float(cells[5])
    assert float(cells[6]) <= est <= float(cells[7])


def test_oracle_size_guard(tmp_path, graph_file):
    out = tmp_path / "cond.csv"
    code = main(["conductance", "--graph", str(graph_file), "--radius", "1",
                 "--bits", "8", "--oracle", "--oracle-limit", "10", "--out", str(out)])
    assert code == 2


def test_transitivity_and_triangles_commands(tmp_path, graph_file):
    for cmd in ("transitivity", "triangles"):
        out = tmp_path / f"{cmd}.csv"
        assert main([cmd, "--graph", str(graph_file), "--radius", "1", "--bits", "10",
                     "--out", str(out)]) == 0
        header = _read(out)[0]
        assert header == "node,radius,estimate,cheb_lo,cheb_hi,vp_lo,vp_hi,confidence,plug_in_flag"


def test_bounds_matches_library(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bounds", "--family", "conductance", "--cards", "1000,1500",
                 "--bits", "14", "--confidence", "0.98", "--out", str(out)]) == 0
    lines = _read(out)
    cells = lines[1].split(",")
    assert cells[0] == "conductance"
    assert float(cells[1]) == pytest.approx(2 * 1000 / 1500 - 1)
    assert float(cells[6]) == pytest.approx(0.98)
    assert main(["bounds", "--family", "triangle", "--cards", "2000000",
                 "--bits", "14", "--out", str(out)]) == 0
    assert main(["bounds", "--family", "triangle", "--cards", "1,2",
                 "--bits", "14", "--out", str(out)]) == 2


def test_seeds_degree_max_star(tmp_path):
    gpath = tmp_path / "star.txt"
    from ballsketch import save_edgelist

    save_edgelist(star_graph(6), gpath)
    out = tmp_path / "seeds.csv"
    assert main(["seeds", "--graph", str(gpath), "--criterion", "degree_max",
                 "--k", "3", "--out", str(out)]) == 0
    lines = _read(out)
    assert lines[0] == "rank,node"
    assert lines[1] == "0,0"


def test_nibble_with_seed_file_and_summary(tmp_path, graph_file):
    seeds = tmp_path / "seeds.txt"
    seeds.write_text("0\n7\n19\n")
    out = tmp_path / "nibble.csv"
    summary = tmp_path / "summary.csv"
    assert main(["nibble", "--graph", str(graph_file), "--seeds", str(seeds),
                 "--max-cut", "25", "--out", str(out), "--summary", str(summary)]) == 0
    lines = _read(out)
    assert lines[0] == "seed,best_size,best_conductance"
    assert len(lines) == 4
    s_lines = _read(summary)
    assert s_lines[0] == "set,count,min,q1,median,q3,max"
    assert s_lines[1].startswith("file,3,")


def test_nibble_with_criterion(tmp_path, graph_file):
    out = tmp_path / "nibble.csv"
    assert main(["nibble", "--graph", str(graph_file), "--criterion", "phi_min",
                 "--radius", "1", "--k", "5", "--bits", "8", "--max-cut", "25",
                 "--out", str(out)]) == 0
    assert len(_read(out)) == 6
    assert main(["nibble", "--graph", str(graph_file), "--max-cut", "25",
                 "--out", str(out)]) == 2


def test_exact_command_agrees_with_oracle(tmp_path, graph_file):
    out = tmp_path / "exact.csv"
    assert main(["exact", "--graph", str(graph_file), "--radius", "1",
                 "--out", str(out)]) == 0
    lines = _read(out)
    assert lines[0].split(",") == [
        "node", "radius", "ball_size", "edgeball", "out_edgeball", "in_edgeball",
        "boundary", "volume", "conductance", "triangles_touching", "wedges_centered",
        "transitivity",
    ]
    g = load_edgelist(graph_file)
    from ballsketch import oracle

    cells = lines[2].split(",")  # node 0, radius 1
    v, r = int(cells[0]), int(cells[1])
    assert (v, r) == (0, 1)
    assert int(cells[2]) == len(oracle.exact_ball(g, 0, 1).members)
    assert int(cells[3]) == oracle.exact_edgeball(g, 0, 1)
    assert int(cells[4]) == oracle.exact_out_edgeball(g, 0, 1)
    # The identity that makes the ratio estimator work, straight off the CSV.
    assert 2 * int(cells[3]) - int(cells[4]) == int(cells[6])
    assert int(cells[4]) == int(cells[7])


def test_diptest_command(tmp_path):
    vals = tmp_path / "vals.txt"
    rng = np.random.default_rng(4)
    data = np.concatenate([rng.normal(0, 0.1, 300), rng.normal(5, 0.1, 300)])
    vals.write_text("\n".join(str(x) for x in data))
    out = tmp_path / "dip.csv"
    assert main(["diptest", "--input", str(vals), "--trials", "150",
                 "--rng-seed", "3", "--out", str(out)]) == 0
    lines = _read(out)
    assert lines[0] == "n,dip,p_value,trials"
    cells = lines[1].split(",")
    assert int(cells[0]) == 600
    assert float(cells[2]) < 0.05
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\nnot-a-number\n")
    assert main(["diptest", "--input", str(bad), "--out", str(out)]) == 2


def test_sweep_registers_columns(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep-registers", "--bits", "6,8", "--trials", "2", "--n", "80",
                 "--k", "4", "--mu", "0.2", "--mean-degree", "6",
                 "--out", str(out)]) == 0
    lines = _read(out)
    assert lines[0] == "bits,vp_bound,cheb_bound,mean_error,var_error,mean_abs_error"
    assert len(lines) == 3
    first = lines[1].split(",")
    second = lines[2].split(",")
    assert int(first[0]) == 6 and int(second[0]) == 8
    assert float(first[1]) > float(second[1])  # bounds tighten with registers


def test_manifest_written_and_outputs_reproducible(tmp_path, graph_file):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    man1, man2 = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["balls", "--graph", str(graph_file), "--kind", "node", "--radius", "1",
            "--bits", "7", "--hash-seed", "3"]
    assert main(argv + ["--out", str(out1), "--manifest", str(man1)]) == 0
    assert main(argv + ["--out", str(out2), "--manifest", str(man2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    meta = json.loads(man1.read_text())
    assert meta["subcommand"] == "balls"
    assert meta["hash_seed"] == 3
    assert meta["tool"] == "ballsketch"
    assert "duration_seconds" in meta


def test_output_independent_of_thread_flag(tmp_path, graph_file, monkeypatch):
    out1, out2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    base = ["conductance", "--graph", str(graph_file), "--radius", "1", "--bits", "8"]
    assert main(base + ["--threads", "1", "--out", str(out1)]) == 0
    monkeypatch.setenv("BALLSKETCH_THREADS", "8")
    assert main(base + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    monkeypatch.setenv("BALLSKETCH_THREADS", "lots")
    assert main(base + ["--out", str(out2)]) == 3


def test_exit_codes(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--n", "10", "--k", "1", "--mu", "0.1", "--mean-degree", "2",
              "--bogus-flag"])
    assert exc.value.code == 64
    assert main([]) == 64
    # Missing graph file -> input error.
    assert main(["exact", "--graph", str(tmp_path / "missing.txt")]) == 2
    # Impossible configuration -> configuration error.
    assert main(["gen", "--n", "10", "--k", "3", "--mu", "0.1", "--mean-degree", "2",
                 "--out", str(tmp_path / "x.txt")]) == 3
    gpath = tmp_path / "tiny.txt"
    gpath.write_text("0 1\n")
    assert main(["balls", "--graph", str(gpath), "--kind", "node", "--bits", "3",
                 "--out", str(tmp_path / "y.csv")]) == 3


def test_stdout_output(capsys):
    assert main(["bounds", "--family", "transitivity", "--cards", "4,12",
                 "--bits", "10"]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("family,estimate,")
    manifest = json.loads(captured.err.strip().splitlines()[-1])
    assert manifest["subcommand"] == "bounds"
