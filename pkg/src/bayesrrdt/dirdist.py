"""Discretised directional proposal with a vMF prior and kernel-masked failures.

Directions are parameterised by ``d - 1`` angles in ``[-pi, pi)``.  The unit
vector for angles ``(t1, ..., t_{d-1})`` is built recursively::

    u_2(t)            = (cos t, sin t)
    u_d(t1, rest...)  = (cos t1 * u_{d-1}(rest...), sin t1)

so ``d = 3`` gives ``(cos t1 cos t2, cos t1 sin t2, sin t1)``.  The proposal
lives in raw angle space: for ``d > 2`` no area element is applied, which
over-weights directions near ``sin t1 = +-1`` relative to a uniform measure on
the sphere, and the parameterisation covers the sphere twice.

Bins are centred on the lattice ``-pi + i * width``; bin ``i`` covers
``[centre - width / 2, centre + width / 2)`` on each axis.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_BINS = 10 ** 6
COLLAPSE_FLOOR = 1e-12
TWO_PI = 2.0 * np.pi


class GridExplosion(ValueError):
    pass


class DistributionCollapsed(ArithmeticError):
    pass


def wrap_angle(x):
    """Wrap into [-pi, pi)."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi
    return np.where(y >= np.pi, y - TWO_PI, y)


def angles_to_unit_vector(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d - 1:
        raise ValueError(f"expected {d - 1} angles, got {x.shape[-1]}")
    v = np.stack([np.cos(x[..., -1]), np.sin(x[..., -1])], axis=-1)
    for a in range(d - 3, -1, -1):
        t = x[..., a]
        v = np.concatenate([np.cos(t)[..., None] * v, np.sin(t)[..., None]], axis=-1)
    return v


def unit_vector_to_angles(u) -> np.ndarray:
    """One preimage of ``angles_to_unit_vector`` (leading angles in [-pi/2, pi/2])."""
    u = np.asarray(u, dtype=float)
    d = u.shape[-1]
    out = np.empty(u.shape[:-1] + (d - 1,))
    rest = u
    for a in range(d - 2):
        s = np.clip(rest[..., -1], -1.0, 1.0)
        out[..., a] = np.arcsin(s)
        c = np.cos(out[..., a])
        rest = rest[..., :-1] / np.where(c == 0, 1.0, c)[..., None]
    out[..., d - 2] = np.arctan2(rest[..., 1], rest[..., 0])
    return wrap_angle(out)


@dataclass(frozen=True)
class VmfParams:
    mu: np.ndarray
    kappa: float = 0.0

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        object.__setattr__(self, "mu", mu)
        if abs(np.linalg.norm(mu) - 1.0) > 1e-12:
            raise ValueError("mean direction must be a unit vector")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")

    @classmethod
    def at_angles(cls, angles, kappa: float) -> "VmfParams":
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        mu = angles_to_unit_vector(angles, len(angles) + 1)
        return cls(mu / np.linalg.norm(mu), kappa)

    @classmethod
    def uniform(cls, d: int) -> "VmfParams":
        mu = np.zeros(d)
        mu[0] = 1.0
        return cls(mu, 0.0)


@dataclass(frozen=True)
class KernelParams:
    """Periodic squared-exponential kernel, ``sigma**2 = beta``, period 2*pi.

    Recommended ranges: ``beta`` in [0.8, 0.95], ``lam`` in [pi/8, pi/2].
    """
    beta: float = 0.9
    lam: float = np.pi / 4

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if not self.lam > 0:
            raise ValueError("length scale must be positive")


def vmf_log_density_unnormalized(p: VmfParams, x) -> float:
    x = np.asarray(x, dtype=float)
    if abs(np.linalg.norm(x) - 1.0) > 1e-9:
        raise ValueError("x must be a unit vector")
    return float(p.kappa * (p.mu @ x))


def kernel_eval(k: KernelParams, x, x_prime):
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if x.shape[-1:] != x_prime.shape[-1:]:
        raise ValueError("angle vectors differ in dimension")
    s = np.sum(np.sin((x - x_prime) / 2.0) ** 2, axis=-1)
    return k.beta * np.exp(-2.0 * s / k.lam ** 2)


@dataclass(frozen=True, eq=False)
class AngleGrid:
    bins_per_axis: int
    d: int
    width: float
    centers: np.ndarray   # (B, d - 1)
    units: np.ndarray     # (B, d)

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    def index_of(self, x) -> int:
        return int(self.indices_of(np.atleast_1d(x)[None, :])[0])

    def indices_of(self, xs) -> np.ndarray:
        """Flat bin index for each row of angles in ``xs`` (n, d - 1)."""
        xs = wrap_angle(np.asarray(xs, dtype=float))
        idx = np.floor((xs + np.pi) / self.width + 0.5).astype(int) % self.bins_per_axis
        return np.ravel_multi_index(tuple(idx.T), (self.bins_per_axis,) * (self.d - 1))


@lru_cache(maxsize=32)
def angle_grid(bins_per_axis: int, d: int) -> AngleGrid:
    if bins_per_axis < 4 or d < 2:
        raise ValueError("need bins_per_axis >= 4 and d >= 2")
    if bins_per_axis ** (d - 1) > MAX_BINS:
        raise GridExplosion(f"{bins_per_axis}^{d - 1} bins exceeds the limit of {MAX_BINS}")
    width = TWO_PI / bins_per_axis
    axis = -np.pi + width * np.arange(bins_per_axis)
    mesh = np.meshgrid(*([axis] * (d - 1)), indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=-1)
    units = angles_to_unit_vector(centers, d)
    centers.setflags(write=False)
    units.setflags(write=False)
    return AngleGrid(bins_per_axis, d, width, centers, units)


def default_bins(d: int) -> int:
    return 360 if d == 2 else 36


@dataclass(eq=False)
class DirectionalProposal:
    grid: AngleGrid
    kernel: KernelParams
    prior: VmfParams
    mass: np.ndarray = None
    failed_count: int = 0
    log_normalizer: float = 0.0   # sum of log(alpha_j) since the last reset
    _cdf: np.ndarray = field(default=None, repr=False)
    _prior_mass: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.mass is None:
            self.reset(self.prior)

    @property
    def d(self) -> int:
        return self.grid.d

    def prior_mass(self) -> np.ndarray:
        if self._prior_mass is None:
            logits = self.prior.kappa * (self.grid.units @ self.prior.mu)
            m = np.exp(logits - logits.max())
            self._prior_mass = m / m.sum()
        return self._prior_mass

    def reset(self, prior: VmfParams | None = None):
        if prior is not None and prior is not self.prior:
            self.prior = prior
            self._prior_mass = None
        self.mass = self.prior_mass().copy()
        self.failed_count = 0
        self.log_normalizer = 0.0
        self._cdf = None

    def observe_failure(self, x) -> bool:
        """Mask a failed direction in place; on collapse reset to the prior and return False."""
        w = self.mass * (1.0 - kernel_eval(self.kernel, self.grid.centers, np.atleast_1d(x)))
        total = w.sum()
        if not total >= COLLAPSE_FLOOR:
            self.reset()
            return False
        self.mass = w / total
        self.failed_count += 1
        self.log_normalizer += math.log(total)
        self._cdf = None
        return True

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        if self._cdf is None:
            self._cdf = np.cumsum(self.mass)
        b = int(np.searchsorted(self._cdf, rng.random() * self._cdf[-1], side="right"))
        b = min(b, self.grid.size - 1)
        offset = rng.random(self.d - 1) * self.grid.width
        return wrap_angle(self.grid.centers[b] - self.grid.width / 2 + offset)

    def sample_n(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` independent draws as an (n, d - 1) array."""
        cdf = np.cumsum(self.mass)
        b = np.minimum(np.searchsorted(cdf, rng.random(n) * cdf[-1], side="right"),
                       self.grid.size - 1)
        offset = rng.random((n, self.d - 1)) * self.grid.width
        return wrap_angle(self.grid.centers[b] - self.grid.width / 2 + offset)

    def copy(self) -> "DirectionalProposal":
        return DirectionalProposal(self.grid, self.kernel, self.prior, self.mass.copy(),
                                   self.failed_count, self.log_normalizer,
                                   None, self._prior_mass)

    def write_csv(self, fh):
        """Rows of (bin centre angles..., mass)."""
        w = csv.writer(fh)
        w.writerow([f"angle_{i + 1}" for i in range(self.d - 1)] + ["mass"])
        for c, m in zip(self.grid.centers, self.mass):
            w.writerow([f"{a:.9g}" for a in c] + [f"{m:.9g}"])


def init_proposal(prior: VmfParams, kernel: KernelParams, bins_per_axis: int,
                  d: int) -> DirectionalProposal:
    if prior.mu.shape != (d,):
        raise ValueError("prior mean direction has the wrong dimension")
    return DirectionalProposal(angle_grid(bins_per_axis, d), kernel, prior)


def bayes_update_failure(p: DirectionalProposal, x_failed) -> DirectionalProposal:
    q = p.copy()
    if not q.observe_failure(x_failed):
        raise DistributionCollapsed("proposal mass fell below the underflow floor")
    return q


def sample_direction(p: DirectionalProposal, rng: np.random.Generator) -> np.ndarray:
    return p.sample(rng)
