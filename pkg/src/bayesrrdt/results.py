"""Run results and their JSON record format.

A node counter ``n`` advances once per added node; for RRdT planners an arm
restart also advances it, so "nodes" counts restart roots as well as
extensions.  One metrics entry is recorded per advance.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import PlanGraph


@dataclass
class Counters:
    sampled_points: int = 0
    invalid_connections: int = 0
    # None for planners that do no local sampling
    invalid_local_samples: int | None = None


@dataclass
class MetricsSeries:
    cost: list = field(default_factory=list)
    invalid_connections: list = field(default_factory=list)
    invalid_local_samples: list | None = None
    sampled_points: int = 0
    success: bool = False

    def record(self, cost: float, counters: Counters):
        self.cost.append(cost)
        self.invalid_connections.append(counters.invalid_connections)
        if counters.invalid_local_samples is not None:
            if self.invalid_local_samples is None:
                self.invalid_local_samples = []
            self.invalid_local_samples.append(counters.invalid_local_samples)

    @property
    def nodes(self) -> int:
        return len(self.cost)

    def at(self, checkpoint: int) -> tuple:
        """(cost, invalid connections, invalid local samples) after ``checkpoint`` nodes."""
        if not self.cost:
            return math.inf, 0, None if self.invalid_local_samples is None else 0
        i = min(checkpoint, len(self.cost)) - 1
        ils = None if self.invalid_local_samples is None else self.invalid_local_samples[i]
        return self.cost[i], self.invalid_connections[i], ils

    def to_dict(self) -> dict:
        return {
            "cost": [_num(c) for c in self.cost],
            "invalid_connections": list(self.invalid_connections),
            "invalid_local_samples": self.invalid_local_samples,
            "sampled_points": self.sampled_points,
            "success": self.success,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsSeries":
        return cls([math.inf if c is None else c for c in d["cost"]],
                   list(d["invalid_connections"]), d["invalid_local_samples"],
                   d["sampled_points"], d["success"])


@dataclass(eq=False)
class PlanResult:
    path: list | None
    metrics: MetricsSeries
    graph: PlanGraph
    info: dict = field(default_factory=dict)

    @property
    def success(self) -> bool:
        return self.path is not None

    @property
    def cost(self) -> float:
        return self.graph.best_cost

    def to_dict(self) -> dict:
        g = self.graph.to_dict()
        return {
            "nodes": g["nodes"],
            "edges": g["edges"],
            "tree_ids": g["tree_ids"],
            "path": None if self.path is None else [np.asarray(q).tolist() for q in self.path],
            "cost": _num(self.cost),
            "metrics": self.metrics.to_dict(),
            "info": self.info,
        }

    def dumps(self, **meta) -> str:
        doc = dict(meta)
        doc.update(self.to_dict())
        return json.dumps(doc, separators=(",", ":"), allow_nan=False)


def extract_metrics(result: PlanResult) -> MetricsSeries:
    return result.metrics


def _num(x: float):
    return None if not math.isfinite(x) else x
