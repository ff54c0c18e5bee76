"""Exact distribution of total demand.

Class counts ``K_j`` are independent Poisson(``lambda_j``), so the total
``T = sum j K_j`` is compound Poisson and its pmf follows from convolving
the lattice-scaled Poisson laws.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .moments import ClassMasses

_POISSON_TAIL = 1e-15
_TARGET_TAIL = 1e-12


@dataclass(frozen=True)
class DemandDistribution:
    """pmf of total demand on ``0..d_max``; ``tail_mass`` is what is not represented."""

    pmf: np.ndarray
    tail_mass: float

    @property
    def d_max(self):
        return self.pmf.size - 1

    def mean(self):
        d = np.arange(self.pmf.size)
        return math.fsum(d * self.pmf)

    def second_moment(self):
        d = np.arange(self.pmf.size, dtype=float)
        return math.fsum(d * d * self.pmf)


def _poisson_pmf(lam):
    if lam == 0:
        return np.array([1.0])
    k_max = int(stats.poisson.isf(_POISSON_TAIL, lam)) + 1
    while stats.poisson.sf(k_max, lam) > _POISSON_TAIL:
        k_max += 1
    return stats.poisson.pmf(np.arange(k_max + 1), lam)


def demand_distribution(classes: ClassMasses, d_max: int) -> DemandDistribution:
    """pmf of ``sum j K_j`` truncated to ``0..d_max``."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    pmf = np.zeros(d_max + 1)
    pmf[0] = 1.0
    for j, lam in enumerate(classes.lambdas, start=1):
        q = _poisson_pmf(lam)
        lattice = np.zeros(d_max + 1)
        k = np.arange(min(q.size, d_max // j + 1))
        lattice[k * j] = q[k]
        pmf = np.convolve(pmf, lattice)[: d_max + 1]
    tail = max(0.0, 1.0 - math.fsum(pmf))
    if tail > 0.5:
        raise ValueError(f"d_max={d_max} leaves tail mass {tail:.3g}; enlarge it")
    return DemandDistribution(pmf, tail)


def default_d_max(classes: ClassMasses) -> int:
    """Support size that leaves negligible mass above it."""
    j = np.arange(1, classes.n_max + 1)
    mean = float(np.sum(j * classes.lambdas))
    sd = math.sqrt(float(np.sum(j * j * classes.lambdas)))
    return max(16, int(mean + 20.0 * sd + 10 * classes.n_max))


def converged_distribution(classes: ClassMasses, d_min: int = 0) -> DemandDistribution:
    d_max = max(d_min, default_d_max(classes))
    dist = demand_distribution(classes, d_max)
    while dist.tail_mass >= _TARGET_TAIL and d_max < 10**7:
        d_max *= 2
        dist = demand_distribution(classes, d_max)
    return dist


def exact_loss(classes: ClassMasses, n0: float, strict: bool = True) -> float:
    """``P(T > n0)`` if ``strict`` else ``P(T >= n0)``; ``n0`` may be fractional."""
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    first = math.floor(n0) + 1 if strict else math.ceil(n0)
    if first <= 0:
        return 1.0
    dist = converged_distribution(classes, d_min=first + 1)
    return float(math.fsum(dist.pmf[first:]))
