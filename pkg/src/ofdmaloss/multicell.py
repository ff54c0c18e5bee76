"""Several antennas with independent shadowing and best-server association.

A user at ``x`` sees antenna ``k`` with SIR proportional to
``G_k / |x - y_k|**gamma``, where the gains ``G_k = 1/S_k`` are i.i.d.
log-normal. The observed antenna ``y0`` (the layout's serving antenna)
carries the user's demand when it wins the association and the SIR it
offers is at least ``beta_min``.

Two association rules are available:

``max_sir``
    ``y0`` serves iff ``G_j <= G * (d_j/d_0)**gamma`` for every other antenna.
``paper_literal``
    the distance ratio inverted, ``G_j <= G * (d_0/d_j)**gamma``. Kept for
    comparison with published figures; it is not a physical rule.

Users may live on a disk around ``y0`` (``region="disk"``) or on the
Voronoi cell of ``y0`` within the layout (``region="cell"``).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import ppp, quadrature
from .model import OUTAGE, Scenario, classify_attenuated, effective_n_max
from .moments import ClassMasses
from .montecarlo import estimate_from_totals, run_blocks
from .specfun import normal_cdf

ASSOCIATIONS = ("max_sir", "paper_literal")
REGIONS = ("disk", "cell")

MULTICELL_SPEC = quadrature.QuadSpec(abs_tol=1e-9, rel_tol=1e-7, max_subdivisions=2000)


@dataclass(frozen=True)
class AntennaLayout:
    serving: np.ndarray
    interferers: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self):
        s = np.asarray(self.serving, dtype=float).reshape(2)
        i = np.asarray(self.interferers, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "serving", s)
        object.__setattr__(self, "interferers", i)
        allpos = np.vstack([s, i])
        diff = allpos[:, None, :] - allpos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1]) + np.eye(len(allpos))
        if np.any(dist <= 0):
            raise ValueError("antenna positions must be pairwise distinct")

    @property
    def n_interferers(self):
        return len(self.interferers)

    def offsets(self):
        """Interferer positions relative to the serving antenna."""
        return self.interferers - self.serving

    def relabel(self, k):
        """Layout where antenna ``k`` (0 = serving) plays the serving role."""
        allpos = np.vstack([self.serving, self.interferers])
        order = [k] + [i for i in range(len(allpos)) if i != k]
        return AntennaLayout(allpos[order[0]], allpos[order[1:]])


def hex_layout(radius: float) -> AntennaLayout:
    """Serving antenna at the origin and the first ring of six at distance ``2R``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    r, h = radius, radius * math.sqrt(3.0)
    ring = [(2 * r, 0.0), (r, h), (-r, h), (-2 * r, 0.0), (-r, -h), (r, -h)]
    return AntennaLayout(np.zeros(2), np.array(ring))


def read_layout(path) -> AntennaLayout:
    """Layout file: ``x y`` per line, serving antenna first; ``#`` comments."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append([float(v) for v in line.split()])
    if not rows or any(len(r) != 2 for r in rows):
        raise ValueError(f"{path}: expected lines of 'x y'")
    return AntennaLayout(np.array(rows[0]), np.array(rows[1:]).reshape(-1, 2))


def write_layout(layout: AntennaLayout, path):
    with open(path, "w") as fh:
        for x, y in np.vstack([layout.serving, layout.interferers]).tolist():
            fh.write(f"{x!r} {y!r}\n")


@dataclass(frozen=True)
class MulticellScenario:
    base: Scenario
    layout: AntennaLayout
    association: str = "max_sir"
    region: str = "disk"
    region_radius: Optional[float] = None

    def __post_init__(self):
        if self.base.shadowing is None:
            raise ValueError("multicell needs shadowing parameters")
        if self.association not in ASSOCIATIONS:
            raise ValueError(f"unknown association {self.association!r}")
        if self.region not in REGIONS:
            raise ValueError(f"unknown region {self.region!r}")
        if self.region == "cell" and self.layout.n_interferers == 0:
            raise ValueError("region='cell' needs at least one interferer")
        if self.region_radius is not None and self.region_radius <= 0:
            raise ValueError("region_radius must be positive")

    @property
    def radius(self):
        """Radius of the disk region (default three cell radii)."""
        if self.region_radius is not None:
            return self.region_radius
        return 3.0 * self.base.cell.radius

    def with_(self, **changes):
        return replace(self, **changes)


# ---------------------------------------------------------------- geometry


def _distance_offsets_db(pos, scenario: MulticellScenario):
    """``10 gamma log10(d_j / d_0) / sigma`` per interferer, sign set by association.

    ``pos`` is relative to the serving antenna; the result has a trailing
    interferer axis. ``+inf`` when ``d_0 = 0``.
    """
    gamma = scenario.base.radio.gamma
    sigma = scenario.base.shadowing.sigma_db
    off = scenario.layout.offsets()
    d0 = np.hypot(pos[..., 0], pos[..., 1])[..., None]
    dj = np.hypot(pos[..., 0, None] - off[:, 0], pos[..., 1, None] - off[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        c = 10.0 * gamma * (np.log10(dj) - np.log10(d0)) / sigma
    c = np.where(np.isnan(c), 0.0, c)
    return c if scenario.association == "max_sir" else -c


def serve_probability(x, g, scenario: MulticellScenario):
    """Probability that the serving antenna wins at ``x`` given its gain ``g``.

    ``x`` is an absolute position (broadcasts over leading axes); the
    other antennas' gains are integrated out.
    """
    if np.any(np.asarray(g) <= 0):
        raise ValueError("gain must be positive")
    if scenario.layout.n_interferers == 0:
        return np.ones(np.broadcast_shapes(np.shape(x)[:-1], np.shape(g)))
    sh = scenario.base.shadowing
    pos = np.asarray(x, dtype=float) - scenario.layout.serving
    c = _distance_offsets_db(pos, scenario)
    g_db = 10.0 * np.log10(np.asarray(g, dtype=float))
    arg = (g_db[..., None] + sh.mu_db) / sh.sigma_db + c
    return np.prod(normal_cdf(arg), axis=-1)


def best_server_probability(x, scenario: MulticellScenario, n: int = 64):
    """``serve_probability`` averaged over the serving antenna's own gain."""
    pos = np.asarray(x, dtype=float) - scenario.layout.serving
    if scenario.layout.n_interferers == 0:
        return np.ones(pos.shape[:-1])
    c = _distance_offsets_db(pos, scenario)
    return quadrature.gaussian_expectation(
        lambda z: np.prod(normal_cdf(c[..., :, None] - z[..., None, :]), axis=-2),
        np.full(pos.shape[:-1], -8.0), np.full(pos.shape[:-1], 8.0), n=n)


def _cell_boundary(layout: AntennaLayout):
    """Radial distance from ``y0`` to its Voronoi cell edge, as a function of angle."""
    off = layout.offsets()
    half_sq = 0.5 * np.sum(off**2, axis=1)

    def rho(theta):
        theta = np.asarray(theta, dtype=float)
        proj = np.cos(theta)[..., None] * off[:, 0] + np.sin(theta)[..., None] * off[:, 1]
        with np.errstate(divide="ignore"):
            dist = np.where(proj > 0, half_sq / np.where(proj > 0, proj, 1.0), np.inf)
        return dist.min(axis=-1)

    def active(theta):
        theta = np.asarray(theta, dtype=float)
        proj = np.cos(theta)[..., None] * off[:, 0] + np.sin(theta)[..., None] * off[:, 1]
        with np.errstate(divide="ignore"):
            dist = np.where(proj > 0, half_sq / np.where(proj > 0, proj, 1.0), np.inf)
        return dist.argmin(axis=-1)

    grid = np.linspace(0.0, 2.0 * np.pi, 7201)
    if not np.all(np.isfinite(rho(grid))):
        raise ValueError("the serving antenna's cell is unbounded; use region='disk'")
    idx = active(grid)
    breaks = [0.0]
    for k in np.nonzero(idx[1:] != idx[:-1])[0]:
        lo, hi = grid[k], grid[k + 1]
        a_lo = idx[k]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if active(mid) == a_lo:
                lo = mid
            else:
                hi = mid
        breaks.append(0.5 * (lo + hi))
    breaks.append(2.0 * np.pi)
    return rho, breaks


def cell_area(layout: AntennaLayout) -> float:
    """Area of the serving antenna's Voronoi cell (polygon shoelace)."""
    rho, breaks = _cell_boundary(layout)
    th = np.array(breaks[:-1])
    r = rho(th)
    x, y = r * np.cos(th), r * np.sin(th)
    return 0.5 * abs(float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)))


def region_area(scenario: MulticellScenario) -> float:
    if scenario.region == "cell":
        return cell_area(scenario.layout)
    return math.pi * scenario.radius**2


# ---------------------------------------------------------------- moments


def _class_z_edges(d0, scenario: MulticellScenario):
    """Standard-normal edges of each demand class at serving distance ``d0``.

    Class ``j`` holds ``z`` in ``(edges[..., j-1], edges[..., j]]`` where the
    attenuation is ``10**((mu + sigma z)/10)``.
    """
    base = scenario.base
    radio, sh = base.radio, base.shadowing
    n_max = effective_n_max(radio)
    with np.errstate(divide="ignore"):
        path_db = 10.0 * radio.gamma * np.log10(d0)
    js = np.arange(1, n_max)
    bt_db = 10.0 * np.log10(radio.p_ratio / radio.beta(js))
    edges = [np.full_like(path_db, -np.inf)]
    for b in bt_db:
        edges.append((b - path_db - sh.mu_db) / sh.sigma_db)
    if base.outage_policy == "exclude" and radio.beta_min > 0:
        adm_db = 10.0 * np.log10(radio.p_ratio / radio.beta_min)
        last = (adm_db - path_db - sh.mu_db) / sh.sigma_db
        edges.append(np.maximum(last, edges[-1]))
    else:
        edges.append(np.full_like(path_db, np.inf))
    return np.stack(edges, axis=-1)


def class_density(pos, scenario: MulticellScenario, n: int = 48):
    """Per-class intensity of served users at positions ``pos`` (users/m^2).

    ``pos`` is relative to the serving antenna, shape ``(..., 2)``; the
    result has a trailing class axis.
    """
    d0 = np.hypot(pos[..., 0], pos[..., 1])
    edges = _class_z_edges(d0, scenario)
    intensity = scenario.base.traffic.intensity
    if scenario.layout.n_interferers == 0:
        cdf = normal_cdf(edges)
        return intensity * np.diff(cdf, axis=-1)
    c = _distance_offsets_db(pos, scenario)

    def h(z):
        return np.prod(normal_cdf(c[..., :, None] - z[..., None, :]), axis=-2)

    out = []
    for j in range(edges.shape[-1] - 1):
        out.append(quadrature.gaussian_expectation(h, edges[..., j], edges[..., j + 1], n=n))
    return intensity * np.stack(out, axis=-1)


def multicell_class_masses(scenario: MulticellScenario,
                           spec: quadrature.QuadSpec = MULTICELL_SPEC) -> ClassMasses:
    """Expected number of users of each demand class carried by ``y0``."""
    def f(r, theta):
        r, theta = np.broadcast_arrays(r, theta)
        pos = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
        return class_density(pos, scenario)

    if scenario.region == "cell":
        rho, breaks = _cell_boundary(scenario.layout)
        lam = quadrature.integrate_star_region(f, rho, breaks, spec, order=16)
    else:
        lam = quadrature.integrate_polar_disk(f, scenario.radius, spec, n_theta=16)
    return ClassMasses(np.maximum(np.asarray(lam, dtype=float), 0.0))


# ---------------------------------------------------------------- simulation


def _sample_region(scenario: MulticellScenario, gen, size):
    """Counts per replication and positions relative to ``y0`` for one block."""
    intensity = scenario.base.traffic.intensity
    if scenario.region == "disk":
        counts = ppp.sample_count(intensity * math.pi * scenario.radius**2, gen, size=size)
        pts = ppp.sample_disk(int(counts.sum()), scenario.radius, gen)
        return counts, pts
    rho, _ = _cell_boundary(scenario.layout)
    r_out = float(rho(np.linspace(0, 2 * np.pi, 3601)).max()) * (1 + 1e-9)
    counts = ppp.sample_count(intensity * math.pi * r_out**2, gen, size=size)
    pts = ppp.sample_disk(int(counts.sum()), r_out, gen)
    keep = np.hypot(pts[:, 0], pts[:, 1]) <= rho(np.arctan2(pts[:, 1], pts[:, 0]))
    rep = np.repeat(np.arange(size), counts)
    return np.bincount(rep[keep], minlength=size), pts[keep]


def user_demand_multicell(pos, atten_db, scenario: MulticellScenario):
    """Demand carried by ``y0`` for users at ``pos`` (relative to ``y0``).

    ``atten_db`` has one column per antenna, serving antenna first. Users
    won by another antenna carry 0; outage follows the scenario's policy.
    """
    base = scenario.base
    radio = base.radio
    d0 = np.hypot(pos[:, 0], pos[:, 1])
    served = np.ones(len(pos), dtype=bool)
    if scenario.layout.n_interferers:
        c = _distance_offsets_db(pos, scenario) * base.shadowing.sigma_db
        # G_j dB <= G_0 dB + c_j  <=>  S_j dB >= S_0 dB - c_j
        served = np.all(atten_db[:, 1:] >= atten_db[:, :1] - c, axis=1)
    x = 10.0 ** (atten_db[:, 0] / 10.0) * d0**radio.gamma
    d = np.asarray(classify_attenuated(x, radio))
    if base.outage_policy == "clamp_to_nmax":
        d = np.where(d == OUTAGE, effective_n_max(radio), d)
    return np.where(served, d, 0)


def _multicell_block(scenario, seed, block, size):
    gen = ppp.RngSpec(seed, block).generator()
    counts, pts = _sample_region(scenario, gen, size)
    sh = scenario.base.shadowing
    n_ant = scenario.layout.n_interferers + 1
    atten_db = gen.normal(sh.mu_db, sh.sigma_db, size=(len(pts), n_ant))
    d = user_demand_multicell(pts, atten_db, scenario)
    rep = np.repeat(np.arange(size), counts)
    return np.bincount(rep, weights=d, minlength=size).astype(np.int64)


def simulate_total_demand_multicell(scenario: MulticellScenario, n_reps: int, seed: int,
                                    workers: int = 1):
    return run_blocks(_multicell_block, scenario, n_reps, seed, workers)


def estimate_loss_multicell(scenario: MulticellScenario, n0: float, n_reps: int, seed: int,
                            workers: int = 1, strict: bool = True):
    """Monte Carlo overload probability of the serving antenna."""
    if n_reps < 1000:
        raise ValueError("n_reps must be >= 1000")
    totals = simulate_total_demand_multicell(scenario, n_reps, seed, workers)
    return estimate_from_totals(totals, n0, seed, strict)
