"""Plan graph shared by all planners: nodes, weighted edges, tree bookkeeping.

Node 0 is ``q_init`` and node 1 is ``q_goal``; each is the root of its own
tree.  Shortest-path distances from both roots are maintained incrementally as
edges are inserted (insertions only ever decrease distances), so the cost of
the best init-to-goal path is always ``dist[0][1]``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from . import _kernels as K

INIT, GOAL = 0, 1


def edge_cost(a, b) -> float:
    return math.dist(a, b)


class PlanGraph:
    def __init__(self, d: int, capacity: int = 1024):
        self.d = d
        cap = max(capacity, 4)
        self._nodes = np.empty((cap, d))
        self._tree = np.empty(cap, dtype=np.int64)
        self._head = np.full(cap, -1, dtype=np.int64)
        # shortest distance and predecessor from INIT (row 0) and GOAL (row 1)
        self._dist = np.full((2, cap), np.inf)
        self._pred = np.full((2, cap), -1, dtype=np.int64)
        # half-edge arrays: edge k and k ^ 1 are the two directions of one edge
        self._to = np.empty(4 * cap, dtype=np.int64)
        self._next = np.empty(4 * cap, dtype=np.int64)
        self._wt = np.empty(4 * cap)
        self.size = 0
        self.num_half_edges = 0
        self.trees = DisjointSet()
        self.num_trees = 0
        self.merges = 0

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes[:self.size]

    @property
    def dist(self) -> np.ndarray:
        return self._dist

    @property
    def pred(self) -> np.ndarray:
        return self._pred

    @property
    def tree_labels(self) -> np.ndarray:
        """Tree id each node was created in (not resolved through merges)."""
        return self._tree[:self.size]

    @property
    def num_edges(self) -> int:
        return self.num_half_edges // 2

    @property
    def edges(self) -> list:
        """(u, v, w) for every inserted edge, in insertion order."""
        k = np.arange(0, self.num_half_edges, 2)
        return list(zip(self._to[k + 1].tolist(), self._to[k].tolist(), self._wt[k].tolist()))

    def neighbours(self, u: int) -> list:
        out = []
        e = self._head[u]
        while e >= 0:
            out.append((int(self._to[e]), float(self._wt[e])))
            e = self._next[e]
        return out

    def new_tree(self) -> int:
        tid = self.num_trees
        self.num_trees += 1
        self.trees.add(tid)
        return tid

    def _grow_nodes(self):
        cap = len(self._nodes)
        self._nodes = np.concatenate([self._nodes, np.empty_like(self._nodes)])
        self._tree = np.concatenate([self._tree, np.empty_like(self._tree)])
        self._head = np.concatenate([self._head, np.full(cap, -1, dtype=np.int64)])
        self._dist = np.concatenate([self._dist, np.full((2, cap), np.inf)], axis=1)
        self._pred = np.concatenate([self._pred, np.full((2, cap), -1, dtype=np.int64)], axis=1)

    def _grow_edges(self):
        self._to = np.concatenate([self._to, np.empty_like(self._to)])
        self._next = np.concatenate([self._next, np.empty_like(self._next)])
        self._wt = np.concatenate([self._wt, np.empty_like(self._wt)])

    def add_node(self, q: np.ndarray, tree_id: int) -> int:
        if self.size == len(self._nodes):
            self._grow_nodes()
        i = self.size
        self._nodes[i] = q
        self._tree[i] = tree_id
        if i < 2:
            self._dist[i, i] = 0.0
        self.size += 1
        return i

    def add_root(self, q: np.ndarray) -> tuple[int, int]:
        tid = self.new_tree()
        return self.add_node(q, tid), tid

    def add_edge(self, u: int, v: int) -> float:
        """Insert the undirected edge and lower root distances through it."""
        if self.num_half_edges + 2 > len(self._to):
            self._grow_edges()
        w = K.link(u, v, self.num_half_edges, self._nodes, self._head, self._next, self._to,
                   self._wt, self._dist, self._pred)
        self.num_half_edges += 2
        return w

    def near_node(self, i: int, radius: float) -> tuple[np.ndarray, np.ndarray]:
        """Other nodes within ``radius`` of node ``i`` with their edge lengths."""
        return K.near_with_length(self._nodes, self.size, i, radius)

    def tree_of(self, i: int) -> int:
        return self.trees[int(self._tree[i])]

    def merge_trees(self, a: int, b: int) -> bool:
        if self.trees.connected(a, b):
            return False
        self.trees.merge(a, b)
        self.merges += 1
        return True

    @property
    def num_components(self) -> int:
        return self.trees.n_subsets

    def near(self, q: np.ndarray, radius: float) -> np.ndarray:
        return K.near(self._nodes, self.size, q, radius)

    def near_in_tree(self, q: np.ndarray, tree_label: int, radius: float):
        """Nodes created in ``tree_label`` within ``radius`` of ``q`` with their distances."""
        return K.near_in_tree(self._nodes, self.size, self._tree, tree_label, q, radius)

    def nearest_in_tree(self, q: np.ndarray, tree_label: int) -> int:
        return int(K.nearest_in_tree(self._nodes, self.size, self._tree, tree_label, q))

    @property
    def solved(self) -> bool:
        return self.size > GOAL and math.isfinite(self._dist[INIT, GOAL])

    @property
    def best_cost(self) -> float:
        return float(self._dist[INIT, GOAL]) if self.size > GOAL else math.inf

    def path_indices(self) -> list[int] | None:
        if not self.solved:
            return None
        out = [GOAL]
        pred = self._pred[INIT]
        while out[-1] != INIT:
            out.append(int(pred[out[-1]]))
        return out[::-1]

    def path(self) -> list[np.ndarray] | None:
        idx = self.path_indices()
        return None if idx is None else [self._nodes[i].copy() for i in idx]

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes.tolist(),
            "edges": [[u, v, w] for u, v, w in self.edges],
            "tree_ids": [self.tree_of(i) for i in range(self.size)],
        }
