"""Campbell moments of total subcarrier demand.

Everything goes through :class:`ClassMasses`: ``lambdas[j-1]`` is the
expected number of users of demand class ``j``. Class counts are
independent Poisson variables, so the mean and the quadratic
characteristic of the total demand are ``sum j lambda_j`` and
``sum j**2 lambda_j``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .model import Scenario, compute_thresholds, effective_n_max
from .specfun import log_normal_cdf, normal_cdf


@dataclass(frozen=True)
class MomentPair:
    """Mean ``m`` and quadratic characteristic ``v = int N**2 dLambda``."""

    m: float
    v: float


@dataclass(frozen=True)
class ClassMasses:
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("class masses must be a non-empty vector")
        if np.any(lam < 0):
            raise ValueError("class masses must be nonnegative")
        object.__setattr__(self, "lambdas", lam)

    @property
    def n_max(self):
        return self.lambdas.size

    @property
    def total(self):
        return float(math.fsum(self.lambdas))


def class_masses_deterministic(scenario: Scenario, thresholds=None) -> ClassMasses:
    """Users per class when demand depends on distance only (annuli)."""
    if scenario.mode != "deterministic":
        raise ValueError("deterministic mode required")
    th = thresholds if thresholds is not None else compute_thresholds(scenario)
    r2 = th.radii**2
    lam = math.pi * scenario.traffic.intensity * np.diff(r2)
    return ClassMasses(lam)


def _zeta(scenario):
    return 10.0 * scenario.radio.gamma / (scenario.shadowing.sigma_db * math.log(10.0))


def _alpha(beta, scenario):
    sh = scenario.shadowing
    return (10.0 * math.log10(scenario.radio.p_ratio / beta) - sh.mu_db) / sh.sigma_db


def area_below(beta, scenario: Scenario) -> float:
    """Closed form of ``int_C P(S |x|**gamma <= p_ratio/beta) dx`` (m^2).

    ``pi R^2 Phi(a - zeta ln R) + pi exp(2/zeta^2 + 2a/zeta) Phi(zeta ln R - 2/zeta - a)``
    with ``a = (10 log10(p_ratio/beta) - mu)/sigma``. The second term is
    assembled in log space to avoid overflow for large ``a``.
    """
    if beta == math.inf:
        return 0.0
    big_r = scenario.cell.radius
    a = _alpha(beta, scenario)
    zeta = _zeta(scenario)
    ln_r = math.log(big_r)
    first = math.pi * big_r**2 * normal_cdf(a - zeta * ln_r)
    log_second = 2.0 / zeta**2 + 2.0 * a / zeta + log_normal_cdf(zeta * ln_r - 2.0 / zeta - a)
    return float(first + math.pi * math.exp(log_second))


def area_integrand(r, beta, scenario: Scenario):
    """``r Phi(a - zeta ln r)``: radial density of :func:`area_below` over ``2 pi``."""
    a = _alpha(beta, scenario)
    with np.errstate(divide="ignore"):
        return r * normal_cdf(a - _zeta(scenario) * np.log(r))


def area_below_quadrature(beta, scenario: Scenario, tol: float = 1e-10) -> float:
    """``2 pi int_0^R r Phi(a - zeta ln r) dr`` by adaptive quadrature."""
    if beta == math.inf:
        return 0.0
    big_r = scenario.cell.radius
    spec = quadrature.QuadSpec(abs_tol=tol * math.pi * big_r**2, rel_tol=1e-14,
                               max_subdivisions=4000)
    res = quadrature.integrate_1d(lambda r: area_integrand(r, beta, scenario), 0.0, big_r, spec)
    return 2.0 * math.pi * res.value


def _check_j(j, scenario):
    if scenario.shadowing is None:
        raise ValueError("shadowing parameters required")
    n_max = effective_n_max(scenario.radio)
    if not 0 <= j <= n_max - 1:
        raise ValueError(f"class index {j} outside 0..{n_max - 1}")


def a_j_closed(j: int, scenario: Scenario) -> float:
    """Area-like mass of positions/attenuations with demand at most ``j``."""
    _check_j(j, scenario)
    if j == 0:
        return 0.0
    return area_below(float(scenario.radio.beta(j)), scenario)


def a_j_quadrature(j: int, scenario: Scenario, tol: float = 1e-10) -> float:
    """Same quantity as :func:`a_j_closed`, integrated numerically."""
    _check_j(j, scenario)
    if j == 0:
        return 0.0
    return area_below_quadrature(float(scenario.radio.beta(j)), scenario, tol)


def class_masses_shadowed(scenario: Scenario, method: str = "closed") -> ClassMasses:
    """Users per class under log-normal shadowing in a single cell.

    Under ``clamp_to_nmax`` every user beyond the last threshold is in
    class ``n_max`` (the whole disk is accounted for). Under ``exclude``
    users with SIR below ``beta_min`` are dropped from the last class.
    """
    if scenario.mode == "deterministic":
        raise ValueError("shadowed mode required")
    area = area_below if method == "closed" else area_below_quadrature
    n_max = effective_n_max(scenario.radio)
    a = [0.0] + [area(float(scenario.radio.beta(j)), scenario) for j in range(1, n_max)]
    if scenario.outage_policy == "clamp_to_nmax":
        last = scenario.cell.area
    else:
        last = area(scenario.radio.beta_min, scenario)
    a.append(max(last, a[-1]))
    lam = scenario.traffic.intensity * np.diff(a)
    return ClassMasses(np.maximum(lam, 0.0))


def class_masses(scenario: Scenario) -> ClassMasses:
    """Dispatch on the scenario mode (single-cell modes only)."""
    if scenario.mode == "deterministic":
        return class_masses_deterministic(scenario)
    if scenario.mode == "shadowed":
        return class_masses_shadowed(scenario)
    raise ValueError("use ofdmaloss.multicell for multicell scenarios")


def moments_from_classes(classes: ClassMasses) -> MomentPair:
    j = np.arange(1, classes.n_max + 1, dtype=float)
    lam = classes.lambdas
    return MomentPair(math.fsum(j * lam), math.fsum(j * j * lam))
