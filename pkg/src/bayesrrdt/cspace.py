"""Configuration spaces: point robots and planar n-link arms among 2D polygons."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import _kernels as K


class ContractViolation(ValueError):
    """An operation was called outside its preconditions."""


class SamplingExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class PointRobot:
    pass


@dataclass(frozen=True)
class PlanarArm:
    link_lengths: tuple
    base: tuple = (0.0, 0.0)
    joint_limits: tuple = ()

    def __post_init__(self):
        if not self.link_lengths or any(l <= 0 for l in self.link_lengths):
            raise ContractViolation("link lengths must be positive")
        if not self.joint_limits:
            object.__setattr__(self, "joint_limits",
                               tuple((-np.pi, np.pi) for _ in self.link_lengths))
        if len(self.joint_limits) != len(self.link_lengths):
            raise ContractViolation("one joint limit interval per link")


Robot = Union[PointRobot, PlanarArm]


@dataclass(eq=False)
class World:
    """Validity oracle over configurations and straight C-space motions.

    For a ``PlanarArm`` the bounds are the joint limits and obstacles live in
    the arm's 2D workspace. Treat instances as immutable once built.
    """
    bounds: np.ndarray
    obstacles: list = field(default_factory=list)
    robot: Robot = field(default_factory=PointRobot)
    motion_check_resolution: float = 0.01

    def __post_init__(self):
        if isinstance(self.robot, PlanarArm):
            self.bounds = np.asarray(self.robot.joint_limits, dtype=float)
        self.bounds = np.asarray(self.bounds, dtype=float).reshape(-1, 2)
        if isinstance(self.robot, PointRobot) and self.bounds.shape[0] != 2:
            raise ContractViolation("a point robot lives in a 2D C-space")
        if np.any(self.bounds[:, 0] > self.bounds[:, 1]):
            raise ContractViolation("empty bounds interval")
        if not self.motion_check_resolution > 0:
            raise ContractViolation("motion_check_resolution must be positive")
        self.obstacles = [np.asarray(p, dtype=float).reshape(-1, 2) for p in self.obstacles]
        for p in self.obstacles:
            if len(p) < 3:
                raise ContractViolation("obstacle polygons need at least 3 vertices")
        self._pack()

    def _pack(self):
        polys = self.obstacles
        self._verts = (np.concatenate(polys) if polys else np.zeros((0, 2)))
        self._offs = np.zeros(len(polys) + 1, dtype=np.int64)
        self._offs[1:] = np.cumsum([len(p) for p in polys])
        self._bbox = np.array([[p[:, 0].min(), p[:, 1].min(), p[:, 0].max(), p[:, 1].max()]
                               for p in polys]).reshape(-1, 4)
        self._lo = np.ascontiguousarray(self.bounds[:, 0])
        self._hi = np.ascontiguousarray(self.bounds[:, 1])
        self._is_arm = isinstance(self.robot, PlanarArm)
        if self._is_arm:
            self._links = np.asarray(self.robot.link_lengths, dtype=float)
            self._base = np.asarray(self.robot.base, dtype=float)
        else:
            self._links = np.zeros(0)
            self._base = np.zeros(2)

    @property
    def d(self) -> int:
        return self.bounds.shape[0]

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.bounds[:, 1] - self.bounds[:, 0]))

    def _args(self):
        return (self._is_arm, self._lo, self._hi, self._links, self._base,
                self._verts, self._offs, self._bbox)

    def workspace_extent(self) -> np.ndarray:
        """Axis-aligned (xmin, ymin, xmax, ymax) box the robot and obstacles occupy."""
        if self._is_arm:
            r = float(self._links.sum())
            bx, by = self._base
            box = np.array([bx - r, by - r, bx + r, by + r])
        else:
            box = np.array([self._lo[0], self._lo[1], self._hi[0], self._hi[1]])
        if len(self._bbox):
            box[:2] = np.minimum(box[:2], self._bbox[:, :2].min(0))
            box[2:] = np.maximum(box[2:], self._bbox[:, 2:].max(0))
        return box


@dataclass(frozen=True)
class Motion:
    start: np.ndarray
    end: np.ndarray


def as_config(world: World, q: Sequence[float]) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (world.d,):
        raise ContractViolation(f"config has shape {q.shape}, world expects ({world.d},)")
    if not np.all(np.isfinite(q)):
        raise ContractViolation("config coordinates must be finite")
    return q


def is_valid(world: World, q) -> bool:
    q = as_config(world, q)
    return bool(K.config_valid(q, *world._args()))


def is_motion_valid(world: World, m: Motion) -> bool:
    a = as_config(world, m.start)
    b = as_config(world, m.end)
    return bool(K.motion_valid(a, b, world.motion_check_resolution, *world._args()))


def motion_valid(world: World, a: np.ndarray, b: np.ndarray) -> bool:
    """Unchecked fast path used by the planners."""
    return K.motion_valid(a, b, world.motion_check_resolution, *world._args())


def batch_valid(world: World, qs: np.ndarray) -> np.ndarray:
    qs = np.ascontiguousarray(qs, dtype=float).reshape(-1, world.d)
    return K.batch_valid(qs, *world._args())


def forward_kinematics(world: World, q) -> np.ndarray:
    """Link segments of the arm at ``q`` as an (n, 2, 2) array of (start, end) points.

    Link ``i`` is oriented at the sum of joint angles ``0..i`` and starts where
    link ``i - 1`` ends; link 0 starts at the base.
    """
    if not isinstance(world.robot, PlanarArm):
        raise ContractViolation("forward kinematics needs a PlanarArm world")
    q = as_config(world, q)
    return K.arm_links(q, world._links, world._base)


def sample_free_counted(world: World, rng: np.random.Generator,
                        max_rejections: int = 100_000, batch: int = 64):
    """Uniform rejection sampling; returns the config and the number of draws used."""
    lo, hi = world._lo, world._hi
    drawn = 0
    while drawn <= max_rejections:
        qs = lo + (hi - lo) * rng.random((batch, world.d))
        ok = batch_valid(world, qs)
        hit = np.flatnonzero(ok)
        if hit.size and drawn + hit[0] <= max_rejections:
            return qs[hit[0]].copy(), drawn + int(hit[0]) + 1
        drawn += batch
    raise SamplingExhausted(f"free-space sampling exhausted after {max_rejections} rejections")


def sample_free(world: World, rng: np.random.Generator, max_rejections: int = 100_000) -> np.ndarray:
    return sample_free_counted(world, rng, max_rejections)[0]
