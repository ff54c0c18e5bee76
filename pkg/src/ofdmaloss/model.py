"""Scenario parameters and per-user subcarrier demand.

A user needs ``N = ceil(c0 / (w log2(1 + SIR)))`` subcarriers. Because
``N`` only takes integer values, demand is a class function: class ``j``
collects all users needing exactly ``j`` subcarriers. The class boundaries
are the SIR thresholds ``beta_j = 2**(c0/(j w)) - 1``.

Classification is done against the thresholds themselves rather than by
evaluating the ceiling, so a user sitting exactly on a boundary always
lands in the lower class.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

MODES = ("deterministic", "shadowed", "multicell")
OUTAGE_POLICIES = ("clamp_to_nmax", "exclude")

#: demand returned for a user whose SIR is below ``beta_min``
OUTAGE = 0

_MAX_DEMAND = 10**6


@dataclass(frozen=True)
class RadioParams:
    """Link budget.

    ``p_ratio`` is the product ``P_t K / I``; transmit power, path-loss
    constant and noise never appear separately. ``n_max`` optionally caps
    the subcarriers granted to an admitted user; when None the cap is
    derived from ``beta_min``.
    """

    gamma: float
    c0: float
    w: float
    p_ratio: float
    mean_gain: float = 1.0
    beta_min: float = 0.0
    n_max: Optional[int] = None

    def __post_init__(self):
        if self.gamma <= 0 or self.c0 <= 0 or self.w <= 0:
            raise ValueError("gamma, c0 and w must be positive")
        if self.p_ratio <= 0 or self.mean_gain <= 0:
            raise ValueError("p_ratio and mean_gain must be positive")
        if self.beta_min < 0:
            raise ValueError("beta_min must be >= 0")
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def spectral_load(self):
        """``c0 / w``, bits per second per Hz a user must carry."""
        return self.c0 / self.w

    def beta(self, j):
        """SIR threshold above which ``j`` subcarriers suffice."""
        return 2.0 ** (self.spectral_load / np.asarray(j, dtype=float)) - 1.0


@dataclass(frozen=True)
class TrafficParams:
    """Arrival surface density ``rho`` (1/(s m^2)) and service rate ``nu`` (1/s)."""

    rho: float
    nu: float

    def __post_init__(self):
        if self.rho <= 0 or self.nu <= 0:
            raise ValueError("rho and nu must be positive")

    @property
    def intensity(self):
        """Equilibrium density of active users per m^2 (M/M/inf occupancy)."""
        return self.rho / self.nu


@dataclass(frozen=True)
class CellGeometry:
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def area(self):
        return math.pi * self.radius**2


@dataclass(frozen=True)
class Shadowing:
    mu_db: float
    sigma_db: float

    def __post_init__(self):
        if self.sigma_db <= 0:
            raise ValueError("sigma_db must be positive")


@dataclass(frozen=True)
class Scenario:
    radio: RadioParams
    traffic: TrafficParams
    cell: CellGeometry
    shadowing: Optional[Shadowing] = None
    mode: str = "deterministic"
    outage_policy: str = "clamp_to_nmax"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.outage_policy not in OUTAGE_POLICIES:
            raise ValueError(f"unknown outage_policy {self.outage_policy!r}")
        if self.mode != "deterministic":
            if self.shadowing is None:
                raise ValueError(f"mode {self.mode!r} requires shadowing parameters")
            if self.radio.beta_min <= 0 and self.radio.n_max is None:
                raise ValueError("beta_min > 0 (or an explicit n_max) is required with shadowing")

    @property
    def mean_users(self):
        """Expected number of active users in the cell disk."""
        return self.cell.area * self.traffic.intensity

    def with_(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class DemandThresholds:
    """Class boundaries of the demand function.

    ``betas[0]`` is ``inf``; ``betas[j]`` for ``1 <= j < n_max`` is the SIR
    threshold between classes ``j`` and ``j + 1``. ``radii`` (deterministic
    mode only) holds ``R_0 = 0, R_1, ..., R_{n_max} = R`` clamped to the cell.
    """

    n_max: int
    betas: np.ndarray
    radii: Optional[np.ndarray] = None
    p_ratio: float = field(default=1.0, repr=False)

    @property
    def beta_tilde(self):
        """Thresholds on ``s * r**gamma``; ``beta_tilde[0] = 0``."""
        with np.errstate(divide="ignore"):
            return self.p_ratio / self.betas


def n_max_from_beta_min(radio: RadioParams) -> int:
    """Largest demand of a user whose SIR is at least ``beta_min``."""
    if radio.beta_min <= 0:
        raise ValueError("beta_min must be positive")
    n = max(1, math.ceil(radio.spectral_load / math.log2(1.0 + radio.beta_min)))
    # smallest n with beta_n <= beta_min, robust to rounding in the ceiling
    while n > 1 and radio.beta(n - 1) <= radio.beta_min:
        n -= 1
    while radio.beta(n) > radio.beta_min:
        n += 1
    return n


def effective_n_max(radio: RadioParams) -> int:
    if radio.n_max is not None:
        return radio.n_max
    return n_max_from_beta_min(radio)


def _radius_threshold(j, radio):
    """Distance at which demand steps from ``j`` to ``j + 1`` (unclamped)."""
    return (radio.p_ratio * radio.mean_gain / radio.beta(j)) ** (1.0 / radio.gamma)


def _sir_class(x, scale, radio, power):
    """Smallest ``j >= 1`` with ``x <= (scale / beta_j) ** power``.

    ``x`` is the quantity compared to the thresholds (a distance, or
    ``s * r**gamma``). The ceiling formula gives the estimate, then each
    entry is nudged until it agrees with the thresholds exactly.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        sir = scale / x ** (1.0 / power)
        est = np.ceil(radio.spectral_load / np.log2(1.0 + sir))
    est = np.where(np.isfinite(est), est, _MAX_DEMAND + 1)
    j = np.clip(est, 1, _MAX_DEMAND + 1).astype(np.int64)

    def limit(k):
        return (scale / radio.beta(k)) ** power

    for _ in range(3):
        up = x > limit(j)
        j = np.where(up, j + 1, j)
        down = (j > 1) & (x <= limit(np.maximum(j - 1, 1)))
        j = np.where(down, j - 1, j)
    return j


def demand_deterministic(r, radio: RadioParams):
    """Subcarriers needed at distance ``r`` with the mean gain only.

    Returns at least 1; ``r = 0`` (infinite SIR) needs exactly one.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be >= 0")
    j = _sir_class(r, radio.p_ratio * radio.mean_gain, radio, 1.0 / radio.gamma)
    j = np.where(r == 0, 1, j)
    return j if j.ndim else int(j)


def demand_shadowed(r, s, radio: RadioParams):
    """Subcarriers needed at distance ``r`` under attenuation ``s``.

    Depends on ``(r, s)`` only through ``x = s * r**gamma``: class ``j``
    holds ``beta_tilde_{j-1} < x <= beta_tilde_j``. Users with SIR below
    ``beta_min`` get :data:`OUTAGE`; admitted users are capped at
    :func:`effective_n_max`.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be >= 0")
    if np.any(s <= 0):
        raise ValueError("attenuation must be positive")
    x = s * r**radio.gamma
    return classify_attenuated(x, radio)


def classify_attenuated(x, radio: RadioParams):
    """Demand class from ``x = s * r**gamma`` (see :func:`demand_shadowed`)."""
    x = np.asarray(x, dtype=float)
    n_max = effective_n_max(radio)
    j = _sir_class(x, radio.p_ratio, radio, 1.0)
    j = np.where(x == 0, 1, np.minimum(j, n_max))
    if radio.beta_min > 0:
        outage = x > radio.p_ratio / radio.beta_min
        j = np.where(outage, OUTAGE, j)
    return j if j.ndim else int(j)


def compute_thresholds(scenario: Scenario) -> DemandThresholds:
    """Demand class boundaries for ``scenario``.

    Deterministic mode: the step radii ``R_j`` clamped to the cell radius,
    with ``n_max`` the first class whose radius reaches the cell edge.
    Otherwise: the SIR thresholds ``beta_1 .. beta_{n_max - 1}``.
    """
    radio = scenario.radio
    if scenario.mode == "deterministic":
        big_r = scenario.cell.radius
        n_max = int(demand_deterministic(big_r, radio))
        if n_max > _MAX_DEMAND:
            raise ValueError("demand at the cell edge exceeds 1e6 subcarriers")
        js = np.arange(1, n_max)
        radii = np.concatenate([[0.0], np.minimum(_radius_threshold(js, radio), big_r), [big_r]])
        betas = np.concatenate([[np.inf], radio.beta(js)])
        return DemandThresholds(n_max, betas, radii, radio.p_ratio * radio.mean_gain)

    n_max = effective_n_max(radio)
    betas = np.concatenate([[np.inf], radio.beta(np.arange(1, n_max))])
    return DemandThresholds(n_max, betas, None, radio.p_ratio)
