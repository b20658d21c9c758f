"""Scenario files, seeded repeated experiments, aggregation and table export."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable

import jsonschema
import numpy as np
import shapely

from . import cspace
from .baselines import BaselineConfig, plan_baseline
from .cspace import ContractViolation, PlanarArm, PointRobot, World
from .planner_rrdt import MabParams, PlannerConfig, plan
from .results import MetricsSeries, PlanResult

log = logging.getLogger(__name__)

DEFAULT_CHECKPOINT_EVERY = 250
PLANNER_ORDER = ("rrt_star", "birrt_star", "informed_rrt_star", "rrdt_stationary", "rrdt_bayes")


class ScenarioError(ValueError):
    pass


@dataclass
class PlannerSpec:
    name: str
    kind: str
    params: dict = field(default_factory=dict)


@dataclass(eq=False)
class Scenario:
    name: str
    world: World
    q_init: np.ndarray
    q_goal: np.ndarray
    node_budget: int
    repeats: int
    planners: list
    checkpoint_every: int = DEFAULT_CHECKPOINT_EVERY
    description: str = ""

    def planner(self, name: str) -> PlannerSpec:
        for p in self.planners:
            if p.name == name:
                return p
        raise KeyError(name)


def schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("scenario.schema.json").read_text())


def shipped_scenarios() -> dict:
    """Name -> path of the scenario files bundled with the package."""
    root = resources.files(__package__).joinpath("scenarios")
    return {Path(p.name).stem: Path(str(p)) for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".json")}


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: not valid JSON ({e})") from e
    return scenario_from_dict(doc)


def scenario_from_dict(doc: dict) -> Scenario:
    try:
        jsonschema.validate(doc, schema())
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ScenarioError(f"{where}: {e.message}") from None

    world = world_from_dict(doc["world"])

    ends = {}
    for key in ("q_init", "q_goal"):
        q = np.asarray(doc[key], dtype=float)
        if q.shape != (world.d,):
            raise ScenarioError(f"{key}: expected {world.d} coordinates")
        if not cspace.is_valid(world, q):
            raise ScenarioError(f"invalid endpoint {key}")
        ends[key] = q

    planners = [PlannerSpec(p["name"], p["kind"], dict(p.get("params", {}))) for p in doc["planners"]]
    names = [p.name for p in planners]
    if len(set(names)) != len(names):
        raise ScenarioError("planners: duplicate planner name")
    scenario = Scenario(doc["name"], world, ends["q_init"], ends["q_goal"], doc["node_budget"],
                        doc["repeats"], planners,
                        doc.get("checkpoint_every", DEFAULT_CHECKPOINT_EVERY),
                        doc.get("description", ""))
    for i, p in enumerate(planners):
        try:
            make_config(scenario, p, 0)
        except (TypeError, ValueError) as e:
            raise ScenarioError(f"planners/{i}/params: {e}") from None
    return scenario


def world_from_dict(w: dict) -> World:
    """Build a World from the ``world`` section of a scenario or run record."""
    r = w["robot"]
    if r["type"] == "planar_arm":
        try:
            robot = PlanarArm(tuple(r["link_lengths"]), tuple(r.get("base", (0.0, 0.0))),
                              tuple(tuple(j) for j in r.get("joint_limits", ())))
        except ContractViolation as e:
            raise ScenarioError(f"world/robot: {e}") from None
    else:
        robot = PointRobot()
        if "bounds" not in w:
            raise ScenarioError("world/bounds: required for a point robot")
    for i, poly in enumerate(w.get("obstacles", [])):
        if not shapely.Polygon(poly).is_valid:
            raise ScenarioError(f"world/obstacles/{i}: polygon is not simple")
    try:
        return World(bounds=w.get("bounds", [[0, 1]] * len(r.get("link_lengths", []))),
                     obstacles=w.get("obstacles", []), robot=robot,
                     motion_check_resolution=w["motion_check_resolution"])
    except ContractViolation as e:
        raise ScenarioError(f"world: {e}") from None


def world_to_dict(world: World) -> dict:
    out = {"motion_check_resolution": world.motion_check_resolution,
           "obstacles": [p.tolist() for p in world.obstacles]}
    if isinstance(world.robot, PlanarArm):
        out["robot"] = {"type": "planar_arm", "link_lengths": list(world.robot.link_lengths),
                        "base": list(world.robot.base),
                        "joint_limits": world.bounds.tolist()}
    else:
        out["robot"] = {"type": "point"}
        out["bounds"] = world.bounds.tolist()
    return out


def make_config(s: Scenario, spec: PlannerSpec, seed: int, node_budget: int | None = None):
    budget = node_budget or s.node_budget
    params = dict(spec.params)
    if spec.kind == "rrdt":
        allowed = {f.name for f in dataclasses.fields(PlannerConfig)} - {"node_budget", "rng_seed"}
        _check_params(params, allowed)
        if "mab" in params:
            params["mab"] = MabParams(**params["mab"])
        return PlannerConfig(node_budget=budget, rng_seed=seed, **params)
    allowed = {f.name for f in dataclasses.fields(BaselineConfig)} - {"node_budget", "rng_seed", "variant"}
    _check_params(params, allowed)
    return BaselineConfig(variant=spec.kind, node_budget=budget, rng_seed=seed, **params)


def _check_params(params: dict, allowed: set):
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise ValueError(f"unknown parameter {unknown[0]!r}")


def run_planner(s: Scenario, spec: PlannerSpec, seed: int, node_budget: int | None = None) -> PlanResult:
    cfg = make_config(s, spec, seed, node_budget)
    if spec.kind == "rrdt":
        return plan(s.world, s.q_init, s.q_goal, cfg)
    return plan_baseline(s.world, s.q_init, s.q_goal, cfg)


@dataclass
class RunRecord:
    scenario: str
    planner: str
    seed: int
    success: bool
    sampled_points: int
    metrics: MetricsSeries | None
    cost: float
    elapsed: float = 0.0
    error: str | None = None
    result: PlanResult | None = field(default=None, repr=False)

    @property
    def name(self) -> str:
        return record_name(self.scenario, self.planner, self.seed)

    @property
    def seconds_per_sample(self) -> float:
        return self.elapsed / max(self.sampled_points, 1)


def record_name(scenario: str, planner: str, seed: int) -> str:
    return f"{scenario}_{planner}_{seed}"


@dataclass
class AggregateRow:
    planner: str
    sampled_points_mean: float
    sampled_points_std: float
    success_rate: float
    checkpoints: list
    cost_mean: list
    cost_std: list
    invalid_connections_mean: list
    invalid_connections_std: list
    invalid_local_mean: list
    invalid_local_std: list
    runs: int = 0


@dataclass
class ExperimentResult:
    scenario: str
    base_seed: int
    rows: list
    records: list

    def records_for(self, planner: str) -> list:
        return [r for r in self.records if r.planner == planner]

    def row(self, planner: str) -> AggregateRow:
        return next(r for r in self.rows if r.planner == planner)


def checkpoints(node_budget: int, every: int) -> list:
    cps = list(range(every, node_budget + 1, every))
    if not cps or cps[-1] != node_budget:
        cps.append(node_budget)
    return cps


def run_experiment(s: Scenario, base_seed: int, planners: Iterable[str] | None = None,
                   repeats: int | None = None, node_budget: int | None = None,
                   checkpoint_every: int | None = None, keep_results: bool = False,
                   on_record: Callable[[RunRecord, PlanResult], None] | None = None) -> ExperimentResult:
    """Run every planner ``repeats`` times with seeds ``base_seed + r``.

    Planners that raise are recorded as failed runs; the batch continues.
    """
    names = list(planners) if planners else [p.name for p in s.planners]
    specs = [s.planner(n) for n in names]
    repeats = repeats or s.repeats
    budget = node_budget or s.node_budget
    records = []
    for spec in specs:
        for r in range(repeats):
            seed = base_seed + r
            t0 = time.perf_counter()
            try:
                res = run_planner(s, spec, seed, budget)
            except Exception as e:  # noqa: BLE001 - recorded, batch continues
                log.warning("%s failed: %s", record_name(s.name, spec.name, seed), e)
                rec = RunRecord(s.name, spec.name, seed, False, 0, None, math.inf,
                                time.perf_counter() - t0, error=f"{type(e).__name__}: {e}")
            else:
                rec = RunRecord(s.name, spec.name, seed, res.success, res.metrics.sampled_points,
                                res.metrics, res.cost, time.perf_counter() - t0,
                                result=res if keep_results else None)
                if on_record is not None:
                    on_record(rec, res)
            records.append(rec)
            log.info("%s success=%s samples=%d cost=%.4g (%.1fs)", rec.name, rec.success,
                     rec.sampled_points, rec.cost, rec.elapsed)
    cps = checkpoints(budget, checkpoint_every or s.checkpoint_every)
    return ExperimentResult(s.name, base_seed, aggregate(records, names, cps, repeats), records)


def _mean_std(values) -> tuple:
    a = np.asarray([v for v in values if v is not None and math.isfinite(v)], dtype=float)
    if a.size == 0:
        return math.nan, math.nan
    return float(a.mean()), float(a.std())


def aggregate(records: list, planners: list, cps: list, repeats: int) -> list:
    rows = []
    for name in planners:
        recs = [r for r in records if r.planner == name]
        ok = [r for r in recs if r.error is None]
        sp_mean, sp_std = _mean_std([r.sampled_points for r in ok])
        series = {k: ([], []) for k in ("cost", "conn", "local")}
        for c in cps:
            at = [r.metrics.at(c) for r in ok]
            for key, i in (("cost", 0), ("conn", 1), ("local", 2)):
                m, sd = _mean_std([a[i] for a in at])
                series[key][0].append(m)
                series[key][1].append(sd)
        rows.append(AggregateRow(
            name, sp_mean, sp_std, sum(r.success for r in recs) / max(repeats, len(recs), 1),
            list(cps), *series["cost"], *series["conn"], *series["local"], runs=len(recs)))
    return rows


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    return f"{x:.6g}"


def columns(rows: list, which: str = "all") -> list:
    head = ["planner", "samp_pt_mean", "samp_pt_std", "success_rate"]
    if not rows:
        return head
    cps = rows[0].checkpoints if which == "all" else rows[0].checkpoints[-1:]
    for c in cps:
        head += [f"cost_mean_{c}", f"cost_std_{c}", f"inv_conn_mean_{c}", f"inv_conn_std_{c}",
                 f"inv_local_mean_{c}", f"inv_local_std_{c}"]
    return head


def _values(row: AggregateRow, which: str) -> list:
    out = [row.planner, row.sampled_points_mean, row.sampled_points_std, row.success_rate]
    idx = range(len(row.checkpoints)) if which == "all" else [len(row.checkpoints) - 1]
    for i in idx:
        out += [row.cost_mean[i], row.cost_std[i], row.invalid_connections_mean[i],
                row.invalid_connections_std[i], row.invalid_local_mean[i], row.invalid_local_std[i]]
    return out


def export(rows: list, fmt: str = "csv", checkpoints: str | None = None) -> str:
    """Render rows as ``csv`` (all checkpoints) or ``markdown`` (final checkpoint only).

    Numbers carry 6 significant digits; missing values print as ``nan``.
    """
    which = checkpoints or ("all" if fmt == "csv" else "final")
    head = columns(rows, which)
    body = [[_fmt(v) for v in _values(r, which)] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        w.writerows(body)
        return buf.getvalue()
    if fmt in ("markdown", "markdown-table", "md"):
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        lines += ["| " + " | ".join(b) + " |" for b in body]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")


def parse_csv(text: str) -> list:
    """Inverse of ``export(..., 'csv')`` into dicts of floats (planner stays a string)."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append({k: (v if k == "planner" else float(v)) for k, v in row.items()})
    return out
