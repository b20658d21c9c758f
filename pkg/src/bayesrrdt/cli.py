"""Command line: run scenarios, render records, replay directional failures.

Exit codes: 0 ok, 2 usage or configuration error, 3 I/O failure.  Every
option can also be set through an environment variable named
``BAYESRRDT_<SUBCOMMAND>_<OPTION>``, e.g. ``BAYESRRDT_RUN_SEED=7``.
"""
from __future__ import annotations

import json
import logging
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import bench
from .dirdist import KernelParams, VmfParams, init_proposal
from .render import render_polar, render_record

EXIT_CONFIG = 2
EXIT_IO = 3
ENV_PREFIX = "BAYESRRDT"
U64 = click.IntRange(0, 2 ** 64 - 1)

log = logging.getLogger("bayesrrdt")


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


class OutputError(click.ClickException):
    exit_code = EXIT_IO


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from None


def _load(path) -> bench.Scenario:
    try:
        return bench.load_scenario(path)
    except FileNotFoundError:
        raise ConfigError(f"scenario file not found: {path}") from None
    except OSError as e:
        raise ConfigError(f"cannot read scenario {path}: {e}") from None
    except bench.ScenarioError as e:
        raise ConfigError(f"{path}: {e}") from None


@click.group(context_settings={"auto_envvar_prefix": ENV_PREFIX, "show_default": True})
@click.option("-v", "--verbose", count=True, help="Log progress (-vv for debug).")
def main(verbose):
    """Bayesian local-sampling RRdT* and RRT* baselines: benchmarks and plots."""
    level = logging.WARNING - 10 * min(verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(message)s", stream=sys.stderr)


@main.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(dir_okay=False),
              help="Scenario JSON file, or the name of a bundled scenario.")
@click.option("--seed", type=U64, default=0, help="Base seed; repeat r uses seed + r.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="results")
@click.option("--planner", "planners", default=None,
              help="Comma-separated planner names (default: all in the scenario).")
@click.option("--repeats", type=click.IntRange(1), default=None, help="Override repeats.")
@click.option("--node-budget", type=click.IntRange(2), default=None, help="Override budget.")
@click.option("--checkpoint-every", type=click.IntRange(1), default=None)
@click.option("--render-trees", is_flag=True, help="Also write an SVG of each run's graph.")
@click.option("--render-path", is_flag=True, help="Also write an SVG of each run's path.")
@click.option("--color-by-tree", is_flag=True, help="Colour rendered edges by tree.")
def run(scenario_path, seed, out_dir, planners, repeats, node_budget, checkpoint_every,
        render_trees, render_path, color_by_tree):
    """Run a scenario and write CSV, raw run records and a markdown summary."""
    s = _load(_resolve_scenario(scenario_path))
    names = [p.strip() for p in planners.split(",")] if planners else None
    if names:
        unknown = [n for n in names if n not in {p.name for p in s.planners}]
        if unknown:
            raise ConfigError(f"unknown planner {unknown[0]!r} in scenario {s.name}")
    out = Path(out_dir)
    world = bench.world_to_dict(s.world)

    def record_doc(rec, res=None):
        meta = {"scenario": s.name, "planner": rec.planner, "seed": rec.seed, "world": world,
                "q_init": s.q_init.tolist(), "q_goal": s.q_goal.tolist(), "success": rec.success, "error": rec.error}
        if res is None:
            return json.dumps({**meta, "metrics": None, "path": None},
                              separators=(",", ":"))
        return res.dumps(**meta)

    def on_record(rec, res):
        text = record_doc(rec, res)
        _write(out / "records" / f"{rec.name}.json", text)
        if render_trees or render_path:
            svg = render_record(s.world, json.loads(text), render_trees, render_path, color_by_tree)
            _write(out / "renders" / f"{rec.name}.svg", svg)

    result = bench.run_experiment(s, seed, names, repeats, node_budget, checkpoint_every,
                                  on_record=on_record)
    for rec in result.records:
        if rec.error is not None:
            _write(out / "records" / f"{rec.name}.json", record_doc(rec))
    _write(out / f"{s.name}.csv", bench.export(result.rows, "csv"))
    summary = f"# {s.name} (base seed {seed})\n\n" + bench.export(result.rows, "markdown")
    _write(out / f"{s.name}.md", summary)
    click.echo(summary, nl=False)


def _resolve_scenario(path: str):
    p = Path(path)
    if not p.exists():
        shipped = bench.shipped_scenarios()
        if path in shipped:
            return shipped[path]
    return p


@main.command()
@click.argument("record_path", type=click.Path(dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="SVG file (default: record path with .svg).")
@click.option("--render-trees", is_flag=True, help="Draw nodes and edges.")
@click.option("--render-path", is_flag=True, help="Highlight the solution path.")
@click.option("--color-by-tree", is_flag=True, help="Colour edges and nodes by tree id.")
def render(record_path, out_path, render_trees, render_path, color_by_tree):
    """Render a raw run record as SVG (trees and path both drawn unless one is chosen)."""
    path = Path(record_path)
    try:
        record = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"record not found: {path}") from None
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read record {path}: {e}") from None
    if "world" not in record:
        raise ConfigError(f"{path}: record has no world section")
    try:
        world = bench.world_from_dict(record["world"])
    except bench.ScenarioError as e:
        raise ConfigError(f"{path}: {e}") from None
    if not render_trees and not render_path:
        render_trees = render_path = True
    svg = render_record(world, record, render_trees, render_path, color_by_tree)
    target = Path(out_path) if out_path else path.with_suffix(".svg")
    _write(target, svg)
    click.echo(str(target))


def failure_replay(failures, beta: float = 0.9, lam: float = math.pi / 4, kappa: float = 1.0,
                   mean_angle: float = math.pi / 2, bins: int = 360) -> tuple[list, list, np.ndarray]:
    """Masses of a static vMF and of the sequentially updated proposal after each failure.

    Returns ``(static, bayes, angles)`` where element ``j`` of each list is the
    mass vector after ``j`` failures (element 0 is the prior).
    """
    prior = VmfParams.at_angles([mean_angle], kappa)
    p = init_proposal(prior, KernelParams(beta, lam), bins, 2)
    static = [p.mass.copy()]
    bayes = [p.mass.copy()]
    for x in failures:
        p.observe_failure([x])
        static.append(static[0].copy())
        bayes.append(p.mass.copy())
    return static, bayes, p.grid.centers[:, 0].copy()


def _mass_csv(masses, angles) -> str:
    rows = [["step", "angle", "mass"]]
    for j, m in enumerate(masses):
        rows += [[str(j), f"{a:.9g}", f"{v:.9g}"] for a, v in zip(angles, m)]
    return "\n".join(",".join(r) for r in rows) + "\n"


@main.command("dump-dist")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="dist")
@click.option("--fail-at", "fail_at", type=float, multiple=True,
              help="Failed direction angle (repeatable); default: the prior mean.")
@click.option("--count", type=click.IntRange(0), default=15,
              help="Number of failures when a single --fail-at (or none) is given.")
@click.option("--random-failures", type=click.IntRange(0), default=None,
              help="Instead draw this many failures from the static distribution.")
@click.option("--seed", type=U64, default=0, help="Seed for --random-failures.")
@click.option("--beta", type=click.FloatRange(0, 1), default=0.9)
@click.option("--lam", type=click.FloatRange(0, min_open=True), default=math.pi / 4)
@click.option("--kappa", type=click.FloatRange(0), default=1.0)
@click.option("--mean-angle", type=float, default=math.pi / 2, help="Prior mean direction.")
@click.option("--bins", type=click.IntRange(4), default=360)
@click.option("--snapshots", default="1,5,10,15", help="Steps to draw as polar SVGs.")
def dump_dist(out_dir, fail_at, count, random_failures, seed, beta, lam, kappa, mean_angle,
              bins, snapshots):
    """Replay failures against a static and a Bayesian-updated proposal (2D)."""
    if random_failures is not None:
        p = init_proposal(VmfParams.at_angles([mean_angle], kappa), KernelParams(beta, lam), bins, 2)
        failures = p.sample_n(np.random.default_rng(seed), random_failures)[:, 0].tolist()
    elif len(fail_at) > 1:
        failures = list(fail_at)
    else:
        failures = [fail_at[0] if fail_at else mean_angle] * count
    try:
        steps = sorted({int(t) for t in snapshots.split(",") if t.strip()})
    except ValueError:
        raise ConfigError(f"--snapshots must be comma-separated integers, got {snapshots!r}") from None
    static, bayes, angles = failure_replay(failures, beta, lam, kappa, mean_angle, bins)
    out = Path(out_dir)
    _write(out / "static_mass.csv", _mass_csv(static, angles))
    _write(out / "bayes_mass.csv", _mass_csv(bayes, angles))
    _write(out / "failures.csv", "step,angle\n" + "".join(
        f"{j + 1},{x:.9g}\n" for j, x in enumerate(failures)))
    for t in steps:
        if t > len(failures):
            continue
        svg = render_polar({"static": (angles, static[t], "#1f77b4"),
                            "bayes": (angles, bayes[t], "#d62728")},
                           title=f"after {t} failures")
        _write(out / f"polar_step_{t:03d}.svg", svg)
    click.echo(f"{len(failures)} failures replayed into {out}")


@main.command("validate-scenario")
@click.argument("paths", nargs=-1, required=True, type=click.Path(dir_okay=False))
def validate_scenario(paths):
    """Check scenario files against the schema and geometry rules."""
    for path in paths:
        s = _load(_resolve_scenario(path))
        click.echo(f"ok {s.name}: d={s.world.d} obstacles={len(s.world.obstacles)} "
                   f"planners={','.join(p.name for p in s.planners)}")


if __name__ == "__main__":
    main()
