"""Sampling of marked Poisson point processes on a cell.

Active users in equilibrium form a Poisson process of intensity
``rho/nu`` (M/M/inf occupancy), so snapshots are drawn directly rather
than by simulating arrivals and departures in time.

Random streams are keyed by ``(seed, stream)`` through
:class:`numpy.random.SeedSequence`, so any replication or block can be
regenerated in isolation, on any worker, with identical output.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import Scenario


@dataclass(frozen=True)
class RngSpec:
    seed: int
    stream: int = 0

    def __post_init__(self):
        if self.stream < 0:
            raise ValueError("stream must be >= 0")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed & (2**64 - 1), spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass
class PointConfiguration:
    points: np.ndarray
    marks: Optional[np.ndarray] = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if self.marks is not None:
            self.marks = np.asarray(self.marks, dtype=float)
            if self.marks.shape != (len(self.points),):
                raise ValueError("one mark per point required")
            if np.any(self.marks <= 0):
                raise ValueError("marks must be positive")

    def __len__(self):
        return len(self.points)

    @property
    def radii(self):
        return np.hypot(self.points[:, 0], self.points[:, 1])


def _rng(rng):
    return rng.generator() if isinstance(rng, RngSpec) else rng


def sample_count(lambda_total, rng, size=None):
    """Poisson count with mean ``lambda_total``.

    Delegates to numpy (inversion for small means, transformed rejection
    above), which meets the required law exactly.
    """
    if np.any(np.asarray(lambda_total) < 0):
        raise ValueError("lambda_total must be >= 0")
    out = _rng(rng).poisson(lambda_total, size=size)
    return int(out) if size is None else out


def sample_disk(count, radius, rng):
    """``count`` i.i.d. uniform points on the disk (``r = R sqrt(U)``)."""
    if count < 0 or radius <= 0:
        raise ValueError("need count >= 0 and radius > 0")
    gen = _rng(rng)
    u = gen.random(count)
    v = gen.random(count)
    r = radius * np.sqrt(u)
    theta = 2.0 * np.pi * v
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def sample_attenuation(count, mu_db, sigma_db, rng):
    """Shadowing marks ``S = 10**(Z/10)``, ``Z ~ N(mu_db, sigma_db**2)``."""
    z = _rng(rng).normal(mu_db, sigma_db, size=count)
    return 10.0 ** (z / 10.0)


def sample_marked_cell(scenario: Scenario, rng) -> PointConfiguration:
    """One equilibrium snapshot of users in the cell disk, with marks."""
    if scenario.shadowing is None:
        raise ValueError("scenario has no shadowing parameters")
    gen = _rng(rng)
    n = sample_count(scenario.mean_users, gen)
    pts = sample_disk(n, scenario.cell.radius, gen)
    marks = sample_attenuation(n, scenario.shadowing.mu_db, scenario.shadowing.sigma_db, gen)
    return PointConfiguration(pts, marks)


def sample_cell(scenario: Scenario, rng) -> PointConfiguration:
    """Unmarked snapshot of users in the cell disk."""
    gen = _rng(rng)
    n = sample_count(scenario.mean_users, gen)
    return PointConfiguration(sample_disk(n, scenario.cell.radius, gen))


def mm_inf_occupancy(arrival_rate, service_rate, sample_times, rng):
    """Number in system of an M/M/inf queue, empty at t = 0, at ``sample_times``.

    Arrivals are generated over ``[0, max(sample_times)]``; each brings an
    exponential holding time with mean ``1/service_rate``.
    """
    gen = _rng(rng)
    sample_times = np.asarray(sample_times, dtype=float)
    horizon = float(sample_times.max())
    n_arr = gen.poisson(arrival_rate * horizon)
    arrivals = np.sort(gen.uniform(0.0, horizon, n_arr))
    departures = np.sort(arrivals + gen.exponential(1.0 / service_rate, n_arr))
    arrived = np.searchsorted(arrivals, sample_times, side="right")
    left = np.searchsorted(departures, sample_times, side="right")
    return arrived - left


def write_configuration(config: PointConfiguration, path):
    """Plain-text dump, one ``x y s`` line per point (``s`` omitted if unmarked)."""
    with open(path, "w") as fh:
        for i, (x, y) in enumerate(config.points.tolist()):
            if config.marks is None:
                fh.write(f"{x!r} {y!r}\n")
            else:
                fh.write(f"{x!r} {y!r} {float(config.marks[i])!r}\n")


def read_configuration(path) -> PointConfiguration:
    rows = [line.split() for line in open(path) if line.strip() and not line.startswith("#")]
    if not rows:
        return PointConfiguration(np.empty((0, 2)))
    data = np.array(rows, dtype=float)
    marks = data[:, 2] if data.shape[1] > 2 else None
    return PointConfiguration(data[:, :2], marks)
