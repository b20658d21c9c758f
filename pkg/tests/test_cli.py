import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from click.testing import CliRunner

from bayesrrdt.cli import failure_replay, main
from test_bench import tiny

NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def scen(tmp_path):
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(tiny(repeats=2)))
    return p


def svg(path):
    return ET.parse(path).getroot()


def test_run_writes_outputs(runner, scen, tmp_path):
    out = tmp_path / "o"
    r = runner.invoke(main, ["run", "--scenario", str(scen), "--seed", "3", "--out", str(out),
                             "--render-trees", "--render-path"])
    assert r.exit_code == 0, r.output
    assert (out / "tiny.csv").read_text().startswith("planner,samp_pt_mean")
    assert (out / "tiny.md").exists()
    names = sorted(p.name for p in (out / "records").iterdir())
    assert names == ["tiny_rrdt_bayes_3.json", "tiny_rrdt_bayes_4.json",
                     "tiny_rrt_star_3.json", "tiny_rrt_star_4.json"]
    rec = json.loads((out / "records" / "tiny_rrt_star_3.json").read_text())
    assert rec["seed"] == 3 and rec["planner"] == "rrt_star" and "world" in rec
    assert len(list((out / "renders").glob("*.svg"))) == 4


def test_run_is_deterministic(runner, scen, tmp_path):
    for d in ("a", "b"):
        assert runner.invoke(main, ["run", "--scenario", str(scen), "--seed", "9",
                                    "--out", str(tmp_path / d)]).exit_code == 0
    assert (tmp_path / "a" / "tiny.csv").read_bytes() == (tmp_path / "b" / "tiny.csv").read_bytes()
    for rec in (tmp_path / "a" / "records").iterdir():
        assert rec.read_bytes() == (tmp_path / "b" / "records" / rec.name).read_bytes()


def test_run_planner_filter_and_overrides(runner, scen, tmp_path):
    r = runner.invoke(main, ["run", "--scenario", str(scen), "--out", str(tmp_path),
                             "--planner", "rrdt_bayes", "--repeats", "1", "--node-budget", "60",
                             "--checkpoint-every", "30"])
    assert r.exit_code == 0, r.output
    lines = (tmp_path / "tiny.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("rrdt_bayes")
    assert "cost_mean_60" in lines[0] and "cost_mean_30" in lines[0]


def test_run_unknown_planner_exit_2(runner, scen, tmp_path):
    r = runner.invoke(main, ["run", "--scenario", str(scen), "--out", str(tmp_path), "--planner", "prm"])
    assert r.exit_code == 2 and "unknown planner" in r.output


def test_run_missing_file_exit_2(runner, tmp_path):
    r = runner.invoke(main, ["run", "--scenario", str(tmp_path / "nope.json")])
    assert r.exit_code == 2 and "not found" in r.output


def test_run_bad_scenario_exit_2(runner, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(tiny(node_budget=-5)))
    r = runner.invoke(main, ["run", "--scenario", str(p), "--out", str(tmp_path)])
    assert r.exit_code == 2 and "node_budget" in r.output


def test_run_negative_seed_is_usage_error(runner, scen):
    assert runner.invoke(main, ["run", "--scenario", str(scen), "--seed", "-1"]).exit_code == 2
    assert runner.invoke(main, ["run", "--scenario", str(scen), "--seed", str(2 ** 64)]).exit_code == 2


def test_run_unwritable_output_exit_3(runner, scen, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    r = runner.invoke(main, ["run", "--scenario", str(scen), "--out", str(blocker / "sub"),
                             "--repeats", "1", "--node-budget", "20"])
    assert r.exit_code == 3


def test_env_var_override(runner, scen, tmp_path):
    r = runner.invoke(main, ["run", "--scenario", str(scen), "--out", str(tmp_path), "--repeats", "1",
                             "--node-budget", "20"], env={"BAYESRRDT_RUN_SEED": "42"})
    assert r.exit_code == 0, r.output
    assert (tmp_path / "records" / "tiny_rrt_star_42.json").exists()


def test_run_bundled_scenario_by_name(runner, tmp_path):
    r = runner.invoke(main, ["run", "--scenario", "room", "--out", str(tmp_path), "--repeats", "1",
                             "--node-budget", "30", "--planner", "rrt_star"])
    assert r.exit_code == 0, r.output
    assert (tmp_path / "room.csv").exists()


def test_validate_scenario(runner, scen, tmp_path):
    r = runner.invoke(main, ["validate-scenario", str(scen), "maze"])
    assert r.exit_code == 0 and "ok tiny" in r.output and "ok maze" in r.output
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert runner.invoke(main, ["validate-scenario", str(bad)]).exit_code == 2


@pytest.fixture
def record(runner, scen, tmp_path):
    out = tmp_path / "rec"
    assert runner.invoke(main, ["run", "--scenario", str(scen), "--out", str(out), "--repeats", "1",
                                "--planner", "rrdt_bayes"]).exit_code == 0
    return out / "records" / "tiny_rrdt_bayes_0.json"


def test_render_missing_record_exit_2(runner, tmp_path):
    assert runner.invoke(main, ["render", str(tmp_path / "nope.json")]).exit_code == 2


def test_render_empty_world_has_no_obstacles(runner, record):
    r = runner.invoke(main, ["render", str(record)])
    assert r.exit_code == 0, r.output
    root = svg(record.with_suffix(".svg"))
    assert root.findall(f".//{NS}polygon") == []
    assert root.findall(f".//{NS}line") and root.findall(f".//{NS}circle")


def test_render_single_highlighted_path(runner, record, tmp_path):
    doc = json.loads(record.read_text())
    assert doc["success"] is True and doc["path"]
    out = tmp_path / "p.svg"
    assert runner.invoke(main, ["render", str(record), "--out", str(out), "--render-path"]).exit_code == 0
    root = svg(out)
    paths = [e for e in root.iter(f"{NS}polyline") if e.get("class") == "path"]
    assert len(paths) == 1
    assert root.findall(f".//{NS}line") == []


def test_render_viewbox_matches_world_bounds(runner, record):
    runner.invoke(main, ["render", str(record)])
    assert svg(record.with_suffix(".svg")).get("viewBox") == "0 0 10 10"


def _five_tree_record(tmp_path):
    from bayesrrdt import bench
    world = {"bounds": [[0, 10], [0, 10]], "robot": {"type": "point"},
             "motion_check_resolution": 0.05, "obstacles": []}
    rng = np.random.default_rng(0)
    nodes = rng.uniform(0, 10, (25, 2)).tolist()
    tree_ids = [i % 5 for i in range(25)]
    edges = [[i, i + 5, 1.0] for i in range(20)]
    p = tmp_path / "five.json"
    p.write_text(json.dumps({"world": world, "nodes": nodes, "edges": edges, "tree_ids": tree_ids,
                             "path": None}))
    assert bench.world_from_dict(world)
    return p, tree_ids


def test_color_by_tree_distinct_strokes(runner, tmp_path):
    p, tree_ids = _five_tree_record(tmp_path)
    out = tmp_path / "five.svg"
    assert runner.invoke(main, ["render", str(p), "--out", str(out), "--render-trees",
                                "--color-by-tree"]).exit_code == 0
    strokes = {e.get("stroke") for e in svg(out).iter(f"{NS}line")}
    assert len(strokes) == len(set(tree_ids)) == 5


def test_render_arm_record_draws_poses(runner, tmp_path):
    from bayesrrdt import bench
    s = bench.load_scenario(bench.shipped_scenarios()["arm_passage"])
    doc = {"world": bench.world_to_dict(s.world), "nodes": [s.q_init.tolist(), s.q_goal.tolist()],
           "edges": [], "tree_ids": [0, 1], "path": [s.q_init.tolist(), s.q_goal.tolist()]}
    p = tmp_path / "arm.json"
    p.write_text(json.dumps(doc))
    assert runner.invoke(main, ["render", str(p)]).exit_code == 0
    poses = [e for e in svg(p.with_suffix(".svg")).iter(f"{NS}polyline") if e.get("class") == "pose"]
    assert len(poses) == 2


def _dump(runner, out, *args):
    r = runner.invoke(main, ["dump-dist", "--out", str(out), *args])
    assert r.exit_code == 0, r.output
    return (out / "static_mass.csv").read_text(), (out / "bayes_mass.csv").read_text()


def test_dump_zero_failures_identical(runner, tmp_path):
    static, bayes = _dump(runner, tmp_path, "--count", "0")
    assert static == bayes


def test_dump_beta_zero_identical(runner, tmp_path):
    static, bayes = _dump(runner, tmp_path, "--beta", "0", "--count", "15")
    assert static == bayes


def test_dump_fifteen_failures(runner, tmp_path):
    _dump(runner, tmp_path, "--fail-at", str(math.pi / 2), "--count", "15")
    assert sorted(p.name for p in tmp_path.glob("polar_*.svg")) == [
        "polar_step_001.svg", "polar_step_005.svg", "polar_step_010.svg", "polar_step_015.svg"]
    for p in tmp_path.glob("polar_*.svg"):
        svg(p)
    static, bayes, angles = failure_replay([math.pi / 2] * 15)
    b = int(np.argmin(np.abs(angles - math.pi / 2)))
    assert bayes[15][b] < 1e-3 * bayes[0][b]
    assert all(np.array_equal(s, static[0]) for s in static)


def test_dump_random_failures_seeded(runner, tmp_path):
    a = _dump(runner, tmp_path / "a", "--random-failures", "10", "--seed", "4")
    b = _dump(runner, tmp_path / "b", "--random-failures", "10", "--seed", "4")
    assert a == b


def test_dump_bad_snapshots_exit_2(runner, tmp_path):
    assert runner.invoke(main, ["dump-dist", "--out", str(tmp_path), "--snapshots", "a,b"]).exit_code == 2
