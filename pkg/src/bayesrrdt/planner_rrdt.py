"""RRdT* with disjointed trees and bandit-scheduled local samplers.

Each arm performs an epsilon_n-step random walk.  With ``bayesian=True`` the
arm's directional proposal is masked after every failed direction; with
``bayesian=False`` it stays the vMF centred on the last successful direction
(the stationary proposal).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from . import cspace
from .cspace import ContractViolation, World
from .dirdist import (DirectionalProposal, KernelParams, VmfParams, angle_grid,
                      angles_to_unit_vector, default_bins)
from .graph import GOAL, INIT, PlanGraph
from .results import Counters, MetricsSeries, PlanResult

_IMPROVE_TOL = 1e-12


@dataclass
class MabParams:
    decay: float = 0.9
    exploration_bonus: float = 0.05


@dataclass
class PlannerConfig:
    num_arms: int = 4
    node_budget: int = 10_000
    epsilon_gamma: float = 1.0
    epsilon_min: float | None = None    # default 0.1% of the C-space diagonal
    restart_probability_floor: float = 0.01
    mab: MabParams = field(default_factory=MabParams)
    beta: float = 0.9
    lam: float = math.pi / 4
    kappa: float = 1.0
    bins_per_axis: int | None = None
    bayesian: bool = True
    rng_seed: int = 0
    max_failed_dirs: int | None = None  # default 10 * bins_per_axis
    max_iterations: int | None = None   # default 100 * node_budget

    def __post_init__(self):
        if isinstance(self.mab, dict):
            self.mab = MabParams(**self.mab)
        if self.num_arms < 1:
            raise ContractViolation("need at least one arm")
        if self.node_budget < 2:
            raise ContractViolation("node budget must be at least 2")
        if not self.epsilon_gamma > 0:
            raise ContractViolation("epsilon_gamma must be positive")


@dataclass(eq=False)
class LocalSampler:
    id: int
    position: np.ndarray
    node: int
    tree_id: int
    proposal: DirectionalProposal
    last_success_dir: np.ndarray | None = None
    failed_dirs: list = field(default_factory=list)
    success_count: int = 0
    trial_count: int = 0
    rate: float = 0.0
    weight: float = 0.0


@dataclass
class Extended:
    q_new: np.ndarray
    node: int


@dataclass
class Failed:
    x_failed: np.ndarray


@dataclass
class Merged:
    q_new: np.ndarray
    node: int
    tree_ids: tuple


def vanishing_radius(n: float, d: int, gamma: float) -> float:
    return gamma * (math.log(n) / n) ** (1.0 / d)


def epsilon_n(n: int, d: int, gamma: float, eps_min: float = 0.0) -> float:
    """Step and connection radius; n < 3 uses n = 3, floored at ``eps_min``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return max(eps_min, vanishing_radius(max(n, 3), d, gamma))


def select_arm(arms: list[LocalSampler], rng: np.random.Generator) -> LocalSampler:
    if len(arms) == 1:
        return arms[0]
    cdf = np.cumsum([a.weight for a in arms])
    i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return arms[min(i, len(arms) - 1)]


def update_arm_stats(arm: LocalSampler, success: bool, mab: MabParams = MabParams()) -> LocalSampler:
    arm.rate = mab.decay * arm.rate + (1.0 - mab.decay) * float(success)
    arm.weight = arm.rate + mab.exploration_bonus
    arm.trial_count += 1
    arm.success_count += int(success)
    return arm


def restart_probability(arm: LocalSampler, cfg: PlannerConfig) -> float:
    bonus = cfg.mab.exploration_bonus
    if bonus <= 0:
        return cfg.restart_probability_floor
    return cfg.restart_probability_floor * bonus / (bonus + arm.rate)


def _bins(cfg: PlannerConfig, d: int) -> int:
    return cfg.bins_per_axis or default_bins(d)


def _fresh_proposal(cfg: PlannerConfig, d: int) -> DirectionalProposal:
    return DirectionalProposal(angle_grid(_bins(cfg, d), d),
                               KernelParams(cfg.beta, cfg.lam), VmfParams.uniform(d))


def _spawn(arm_id: int, world: World, graph: PlanGraph, rng, cfg: PlannerConfig) -> LocalSampler:
    q = cspace.sample_free(world, rng)
    node, tid = graph.add_root(q)
    return LocalSampler(arm_id, q, node, tid, _fresh_proposal(cfg, world.d),
                        weight=cfg.mab.exploration_bonus)


def restart_arm(arm: LocalSampler, world: World, graph: PlanGraph, rng,
                cfg: PlannerConfig = None) -> LocalSampler:
    cfg = cfg or PlannerConfig()
    fresh = _spawn(arm.id, world, graph, rng, cfg)
    arm.__dict__.update(fresh.__dict__)
    return arm


def _unit(x: np.ndarray, d: int) -> np.ndarray:
    if d == 2:
        t = float(x[0])
        return np.array([math.cos(t), math.sin(t)])
    return angles_to_unit_vector(x, d)


def connect_and_rewire(graph: PlanGraph, world: World, node: int, radius: float,
                       counters: Counters, skip: int = -1) -> tuple:
    """Merge ``node`` into other trees within ``radius`` and add cost-improving edges.

    One connection (to the nearest node) is attempted per foreign tree.  Then
    every neighbour in the now-merged component gets an edge if that edge
    shortens the distance from either root to either endpoint.
    """
    q = graph.nodes[node]
    nbrs, lengths = graph.near_node(node, radius)
    labels = graph.tree_labels[nbrs]
    own = graph.tree_of(node)
    root = {int(t): graph.trees[int(t)] for t in np.unique(labels)}
    foreign = {}
    for k in range(len(nbrs)):
        t = root[int(labels[k])]
        if t != own and (t not in foreign or lengths[k] < foreign[t][0]):
            foreign[t] = (lengths[k], int(nbrs[k]))
    merged = []
    for t in sorted(foreign):
        v = foreign[t][1]
        if graph.trees.connected(own, t):
            continue
        if cspace.motion_valid(world, q, graph.nodes[v]):
            graph.add_edge(node, v)
            graph.merge_trees(own, t)
            merged.append(t)
        else:
            counters.invalid_connections += 1

    own = graph.tree_of(node)
    for k in np.flatnonzero(K.improving(node, nbrs, lengths, graph.dist, _IMPROVE_TOL)):
        v = int(nbrs[k])
        if v == skip or graph.trees[root[int(labels[k])]] != own:
            continue
        # an earlier edge in this loop may already have made it redundant
        w = lengths[k]
        if not any(graph.dist[s, node] + w < graph.dist[s, v] - _IMPROVE_TOL
                   or graph.dist[s, v] + w < graph.dist[s, node] - _IMPROVE_TOL for s in (INIT, GOAL)):
            continue
        if cspace.motion_valid(world, q, graph.nodes[v]):
            graph.add_edge(node, v)
        else:
            counters.invalid_connections += 1
    return tuple(merged)


def step_local_sampler(arm: LocalSampler, world: World, graph: PlanGraph, n: int, rng,
                       cfg: PlannerConfig = None, counters: Counters = None):
    cfg = cfg or PlannerConfig()
    counters = counters or Counters(invalid_local_samples=0)
    d = world.d
    eps = epsilon_n(n, d, cfg.epsilon_gamma, _eps_min(cfg, world))
    x = arm.proposal.sample(rng)
    q_new = arm.position + eps * _unit(x, d)
    counters.sampled_points += 1
    if not cspace.motion_valid(world, arm.position, q_new):
        if counters.invalid_local_samples is not None:
            counters.invalid_local_samples += 1
        if cfg.bayesian:
            arm.failed_dirs.append(x)
            cap = cfg.max_failed_dirs or 10 * _bins(cfg, d)
            if not arm.proposal.observe_failure(x) or len(arm.failed_dirs) >= cap:
                arm.proposal.reset()
                arm.failed_dirs.clear()
        return Failed(x)

    prev = arm.node
    node = graph.add_node(q_new, arm.tree_id)
    graph.add_edge(prev, node)
    arm.position = q_new
    arm.node = node
    arm.last_success_dir = x
    arm.failed_dirs.clear()
    arm.proposal.reset(VmfParams(_unit(x, d), cfg.kappa))
    merged = connect_and_rewire(graph, world, node, eps, counters, skip=prev)
    if merged:
        return Merged(q_new, node, merged)
    return Extended(q_new, node)


def _eps_min(cfg: PlannerConfig, world: World) -> float:
    return cfg.epsilon_min if cfg.epsilon_min is not None else 1e-3 * world.diagonal


def plan(world: World, q_init, q_goal, cfg: PlannerConfig) -> PlanResult:
    q_init = cspace.as_config(world, q_init)
    q_goal = cspace.as_config(world, q_goal)
    for name, q in (("q_init", q_init), ("q_goal", q_goal)):
        if not cspace.is_valid(world, q):
            raise ContractViolation(f"invalid endpoint {name}")
    rng = np.random.default_rng(cfg.rng_seed)
    N, K = cfg.node_budget, cfg.num_arms
    graph = PlanGraph(world.d, capacity=N + K + 8)
    graph.add_root(q_init)
    graph.add_root(q_goal)
    arms = [_spawn(i, world, graph, rng, cfg) for i in range(K)]

    counters = Counters(invalid_local_samples=0)
    metrics = MetricsSeries()
    queue: deque[int] = deque()
    queued = set()
    restarts = 0
    max_iter = cfg.max_iterations or 100 * N
    iterations = 0
    n = 1
    while n <= N and iterations < max_iter:
        iterations += 1
        probs = np.array([restart_probability(a, cfg) for a in arms])
        for i in np.flatnonzero(rng.random(K) < probs):
            if i not in queued:
                queue.append(int(i))
                queued.add(int(i))
        if queue:
            i = queue.popleft()
            queued.discard(i)
            restart_arm(arms[i], world, graph, rng, cfg)
            restarts += 1
            counters.sampled_points += 1
            n += 1
            metrics.record(graph.best_cost, counters)
            continue
        arm = select_arm(arms, rng)
        out = step_local_sampler(arm, world, graph, n, rng, cfg, counters)
        success = not isinstance(out, Failed)
        if isinstance(out, Merged) and arm.id not in queued:
            queue.append(arm.id)
            queued.add(arm.id)
        if success:
            n += 1
            metrics.record(graph.best_cost, counters)
        update_arm_stats(arm, success, cfg.mab)

    path = graph.path()
    metrics.sampled_points = counters.sampled_points
    metrics.success = path is not None
    info = {"planner": "rrdt_bayes" if cfg.bayesian else "rrdt_stationary",
            "iterations": iterations, "restarts": restarts, "merges": graph.merges,
            "num_arms": K, "components": graph.num_components}
    return PlanResult(path, metrics, graph, info)
