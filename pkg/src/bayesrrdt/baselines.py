"""RRT*, Bi-RRT* and Informed-RRT* over the same graph and metrics contract."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import cspace
from .cspace import ContractViolation, World
from .graph import GOAL, INIT, PlanGraph, edge_cost
from .planner_rrdt import epsilon_n, vanishing_radius
from .results import Counters, MetricsSeries, PlanResult

_IMPROVE_TOL = 1e-12


class Variant(str, enum.Enum):
    RRT_STAR = "rrt_star"
    BI_RRT_STAR = "birrt_star"
    INFORMED_RRT_STAR = "informed_rrt_star"


@dataclass
class BaselineConfig:
    variant: Variant = Variant.RRT_STAR
    node_budget: int = 10_000
    goal_bias: float = 0.05
    steer_epsilon: float | None = None   # default: RRdT's epsilon at n = 3
    gamma: float = 1.0
    rng_seed: int = 0
    max_samples: int | None = None      # default 50 * node_budget

    def __post_init__(self):
        self.variant = Variant(self.variant)
        if not 0.0 <= self.goal_bias <= 1.0:
            raise ContractViolation("goal_bias must lie in [0, 1]")
        if self.node_budget < 2:
            raise ContractViolation("node budget must be at least 2")


def steer(a: np.ndarray, b: np.ndarray, eps: float) -> np.ndarray:
    d = edge_cost(a, b)
    if d <= eps:
        return b.copy()
    return a + (eps / d) * (b - a)


def _rotation_to(u: np.ndarray) -> np.ndarray:
    """Orthogonal matrix whose first column is the unit vector ``u``."""
    d = len(u)
    m = np.eye(d)
    m[:, 0] = u
    q, r = np.linalg.qr(m)
    return q * np.sign(r[0, 0])


class InformedSampler:
    """Uniform samples of ``|s - a| + |s - b| <= c_best`` restricted to the bounds.

    Draws from the prolate hyperspheroid directly (unit ball, stretched and
    rotated onto the focal axis) and rejects points outside the bounds.
    Accepted points from an earlier, larger ellipse are kept in a buffer and
    re-filtered against the current bound, which leaves them uniform.
    """

    def __init__(self, a: np.ndarray, b: np.ndarray, bounds: np.ndarray, batch: int = 256,
                 max_batches: int = 1000):
        self.a, self.b, self.bounds = a, b, bounds
        self.d = len(a)
        self.c_min = edge_cost(a, b)
        u = (b - a) / self.c_min if self.c_min > 0 else np.eye(self.d)[0]
        self.rot = _rotation_to(u)
        self.centre = (a + b) / 2
        self.batch = batch
        self.max_batches = max_batches
        self._buf = np.empty((0, self.d))
        self._buf_bound = math.inf

    def _inside(self, s: np.ndarray, c_best: float) -> np.ndarray:
        ok = np.all((s >= self.bounds[:, 0]) & (s <= self.bounds[:, 1]), axis=1)
        # guard the focal-sum bound against rounding at the surface
        ok &= (np.linalg.norm(s - self.a, axis=1) + np.linalg.norm(s - self.b, axis=1)) <= c_best
        return ok

    def __call__(self, rng, c_best: float) -> np.ndarray | None:
        if c_best < self.c_min:
            return None
        if len(self._buf) and c_best < self._buf_bound:
            self._buf = self._buf[self._inside(self._buf, c_best)]
        self._buf_bound = c_best
        radii = np.full(self.d, math.sqrt(max(c_best ** 2 - self.c_min ** 2, 0.0)) / 2)
        radii[0] = c_best / 2
        for _ in range(self.max_batches):
            if len(self._buf):
                q, self._buf = self._buf[0], self._buf[1:]
                return q
            g = rng.standard_normal((self.batch, self.d))
            ball = g / np.linalg.norm(g, axis=1, keepdims=True)
            ball *= rng.random((self.batch, 1)) ** (1.0 / self.d)
            s = self.centre + (ball * radii) @ self.rot.T
            self._buf = s[self._inside(s, c_best)]
        return None


def sample_informed(rng, a: np.ndarray, b: np.ndarray, c_best: float, bounds: np.ndarray,
                    batch: int = 64, max_batches: int = 1000) -> np.ndarray | None:
    """One-off informed sample; planners keep an ``InformedSampler`` instead."""
    return InformedSampler(a, b, bounds, batch, max_batches)(rng, c_best)


class _Tree:
    """Insertion with choose-parent and rewire, costs measured from one root."""

    def __init__(self, graph: PlanGraph, world: World, counters: Counters,
                 label: int, source: int):
        self.graph = graph
        self.world = world
        self.counters = counters
        self.label = label
        self.source = source

    def radius(self, steer_eps: float, gamma: float) -> float:
        n = max(self.graph.size, 3)
        return min(steer_eps, vanishing_radius(n, self.graph.d, gamma))

    def insert(self, q_new: np.ndarray, nearest: int, radius: float) -> int:
        g, world = self.graph, self.world
        dist = g.dist[self.source]
        idx, lengths = g.near_in_tree(q_new, self.label, radius)
        nbrs = idx.tolist()
        costs = dict(zip(nbrs, lengths.tolist()))
        node = g.add_node(q_new, self.label)
        parent = nearest
        best = dist[nearest] + edge_cost(q_new, g.nodes[nearest])
        for v in sorted(nbrs, key=lambda v: (dist[v] + costs[v], v)):
            if v == nearest or not dist[v] + costs[v] < best - _IMPROVE_TOL:
                continue
            if cspace.motion_valid(world, g.nodes[v], q_new):
                parent = v
                break
            self.counters.invalid_connections += 1
        g.add_edge(parent, node)
        for v in nbrs:
            if v == parent:
                continue
            if dist[node] + costs[v] < dist[v] - _IMPROVE_TOL:
                if cspace.motion_valid(world, q_new, g.nodes[v]):
                    g.add_edge(node, v)
                else:
                    self.counters.invalid_connections += 1
        return node


def plan_baseline(world: World, q_init, q_goal, cfg: BaselineConfig) -> PlanResult:
    q_init = cspace.as_config(world, q_init)
    q_goal = cspace.as_config(world, q_goal)
    for name, q in (("q_init", q_init), ("q_goal", q_goal)):
        if not cspace.is_valid(world, q):
            raise ContractViolation(f"invalid endpoint {name}")
    rng = np.random.default_rng(cfg.rng_seed)
    d = world.d
    N = cfg.node_budget
    steer_eps = cfg.steer_epsilon or epsilon_n(3, d, cfg.gamma)
    graph = PlanGraph(d, capacity=N + 8)
    graph.add_root(q_init)
    graph.add_root(q_goal)
    counters = Counters()
    metrics = MetricsSeries()
    trees = [_Tree(graph, world, counters, 0, INIT), _Tree(graph, world, counters, 1, GOAL)]
    roots = [q_init, q_goal]
    lo, hi = world.bounds[:, 0], world.bounds[:, 1]
    bidirectional = cfg.variant is Variant.BI_RRT_STAR
    informed = cfg.variant is Variant.INFORMED_RRT_STAR
    informed_samples = 0
    informed_sampler = InformedSampler(q_init, q_goal, world.bounds) if informed else None
    max_samples = cfg.max_samples or 50 * N
    n = 1
    side = 0

    def record():
        nonlocal n
        n += 1
        metrics.record(graph.best_cost, counters)

    while n <= N and counters.sampled_points < max_samples:
        counters.sampled_points += 1
        tree, other = trees[side], trees[1 - side]
        if rng.random() < cfg.goal_bias:
            q_rand = roots[1 - side].copy()
        elif informed and graph.solved:
            q_rand = informed_sampler(rng, graph.best_cost)
            if q_rand is None:
                q_rand = lo + (hi - lo) * rng.random(d)
            else:
                informed_samples += 1
        else:
            q_rand = lo + (hi - lo) * rng.random(d)
        if bidirectional:
            side = 1 - side

        near = graph.nearest_in_tree(q_rand, tree.label)
        q_new = steer(graph.nodes[near], q_rand, steer_eps)
        if edge_cost(q_new, graph.nodes[near]) == 0.0:
            continue
        if not cspace.motion_valid(world, graph.nodes[near], q_new):
            counters.invalid_connections += 1
            continue
        node = tree.insert(q_new, near, tree.radius(steer_eps, cfg.gamma))
        record()

        if bidirectional:
            _connect(graph, world, other, node, steer_eps, cfg.gamma, counters, record, N,
                     lambda: n)
        else:
            _try_goal(graph, world, node, steer_eps, counters)

    path = graph.path()
    metrics.sampled_points = counters.sampled_points
    metrics.success = path is not None
    info = {"planner": cfg.variant.value, "informed_samples": informed_samples,
            "steer_epsilon": steer_eps}
    return PlanResult(path, metrics, graph, info)


def _try_goal(graph: PlanGraph, world: World, node: int, radius: float, counters: Counters):
    q = graph.nodes[node]
    w = edge_cost(q, graph.nodes[GOAL])
    if w > radius or not graph.dist[INIT][node] + w < graph.dist[INIT][GOAL] - _IMPROVE_TOL:
        return
    if cspace.motion_valid(world, q, graph.nodes[GOAL]):
        graph.add_edge(node, GOAL)
        graph.merge_trees(graph.tree_of(node), graph.tree_of(GOAL))
    else:
        counters.invalid_connections += 1


def _connect(graph, world, tree: _Tree, target: int, steer_eps, gamma, counters, record,
             budget, current_n):
    """Greedily grow ``tree`` toward node ``target`` of the other tree."""
    q_target = graph.nodes[target].copy()
    cur = graph.nearest_in_tree(q_target, tree.label)
    while True:
        gap = edge_cost(graph.nodes[cur], q_target)
        if gap <= steer_eps:
            a, b = graph.tree_of(cur), graph.tree_of(target)
            improves = any(graph.dist[s][cur] + gap < graph.dist[s][target] - _IMPROVE_TOL
                           or graph.dist[s][target] + gap < graph.dist[s][cur] - _IMPROVE_TOL
                           for s in (INIT, GOAL))
            if a == b and not improves:
                return
            if cspace.motion_valid(world, graph.nodes[cur], q_target):
                graph.add_edge(cur, target)
                graph.merge_trees(a, b)
            else:
                counters.invalid_connections += 1
            return
        if current_n() > budget:
            return
        q_new = steer(graph.nodes[cur], q_target, steer_eps)
        if not cspace.motion_valid(world, graph.nodes[cur], q_new):
            counters.invalid_connections += 1
            return
        cur = tree.insert(q_new, cur, tree.radius(steer_eps, gamma))
        record()
