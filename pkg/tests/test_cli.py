"""Command-line contract: exit codes, artifact headers, reproducibility."""

import json

import pytest
from click.testing import CliRunner

from schmidtlab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def test_derive_prints_constants(runner):
    res = runner.invoke(main, ["derive", "--system", "linear2",
                               "--alpha", "0.1", "--beta", "0.1"])
    assert res.exit_code == 0
    assert "epsilon" in res.output and "0.3" in res.output
    assert "r = 13" in res.output
    assert "N = 89" in res.output


def test_derive_json(runner):
    res = runner.invoke(main, ["derive", "--system", "linear2",
                               "--alpha", "0.1", "--beta", "0.1", "--json"])
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert obj["r"] == 13 and obj["N"] == 89
    assert obj["epsilon"] == pytest.approx(0.3)


def test_derive_invalid_alpha_exits_2(runner):
    res = runner.invoke(main, ["derive", "--system", "linear2",
                               "--alpha", "0.3", "--beta", "0.1"])
    assert res.exit_code == 2
    assert "0.25" in res.output  # cites the admissibility bound


def test_derive_unknown_system_exits_2(runner):
    res = runner.invoke(main, ["derive", "--system", "parabolic9",
                               "--alpha", "0.1", "--beta", "0.1"])
    assert res.exit_code == 2


def test_derive_from_config_file(runner, tmp_path):
    cfg = tmp_path / "sys.cfg"
    cfg.write_text("kind = linear-circle\nd = 2\n")
    res = runner.invoke(main, ["derive", "--system", str(cfg),
                               "--alpha", "0.1", "--beta", "0.1", "--json"])
    assert res.exit_code == 0
    assert json.loads(res.output)["N"] == 89


def test_play_writes_transcript_and_report(runner, tmp_path):
    out = tmp_path / "game.json"
    res = runner.invoke(main, ["play", "--seed", "7", "--out", str(out)])
    assert res.exit_code == 0
    assert "# seed=7" in res.output
    assert "verification ok" in res.output
    t = json.loads(out.read_text())
    rep = json.loads((tmp_path / "game.json.report.json").read_text())
    assert rep["ok"] is True
    assert t["moves"]


def test_play_replay_is_byte_identical(runner, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    r1 = runner.invoke(main, ["play", "--seed", "3", "--out", str(a)])
    r2 = runner.invoke(main, ["play", "--bob", "scripted",
                              "--replay", str(a), "--out", str(b)])
    assert r1.exit_code == 0 and r2.exit_code == 0
    assert a.read_bytes() == b.read_bytes()


def test_play_multi_target(runner, tmp_path):
    targets = tmp_path / "targets.json"
    targets.write_text(json.dumps(
        [{"target": [0.0]}, {"target": [0.3]}, {"target": [0.7]}]))
    out = tmp_path / "multi.json"
    res = runner.invoke(main, ["play", "--beta", "0.9", "--seed", "5",
                               "--targets-file", str(targets), "--out", str(out)])
    assert res.exit_code == 0, res.output
    rep = json.loads((tmp_path / "multi.json.report.json").read_text())
    assert rep["ok"] and rep["schedule_ok"]
    assert len(rep["targets"]) == 3
    assert all(row["ok"] for row in rep["targets"])


def test_tournament_summary(runner, tmp_path):
    out = tmp_path / "summary.csv"
    res = runner.invoke(main, ["tournament", "--games", "10", "--seed", "2",
                               "--bob", "chaser", "--out", str(out)])
    assert res.exit_code == 0
    assert "10/10 verified" in res.output
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("# seed=2")
    assert lines[1] == "seed,winner,min_orbit_distance,length"
    assert len(lines) == 12


def test_tree_reports_closed_form(runner):
    res = runner.invoke(main, ["tree", "--beta", "0.01", "--depth", "2"])
    assert res.exit_code == 0
    assert "0.666667" in res.output


def test_tree_lazy_path_for_deep_trees(runner):
    res = runner.invoke(main, ["tree", "--beta", "0.01", "--depth", "8", "--json"])
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert obj["nodes"] == "lazy"
    assert obj["measured"] == obj["closed_form"] == pytest.approx(2 / 3)


def test_tree_depth_zero_graceful(runner):
    res = runner.invoke(main, ["tree", "--depth", "0", "--beta", "0.1"])
    assert res.exit_code == 0
    assert "no measured bound" in res.output


def test_tree_depth_beyond_block_exits_2(runner):
    res = runner.invoke(main, ["tree", "--beta", "0.01", "--depth", "40"])
    assert res.exit_code == 2


def test_tree_csv_export(runner, tmp_path):
    out = tmp_path / "tree.csv"
    res = runner.invoke(main, ["tree", "--beta", "0.1", "--depth", "2",
                               "--out", str(out)])
    assert res.exit_code == 0
    assert out.read_text().startswith("level,center,radius,mass")


def test_dimension_command(runner, tmp_path):
    out = tmp_path / "sample.csv"
    res = runner.invoke(main, ["dimension", "--count", "200", "--seed", "1",
                               "--out", str(out)])
    assert res.exit_code == 0
    assert "box-counting slope" in res.output
    assert out.read_text().startswith("# provenance:")
    slope = (tmp_path / "sample.csv.slope.csv").read_text()
    assert slope.startswith("# dimension=")


def test_dimension_json(runner):
    res = runner.invoke(main, ["dimension", "--count", "150", "--seed", "4",
                               "--json"])
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert 0.5 <= obj["dimension"] <= 1.1
    assert obj["n_points"] >= 140
