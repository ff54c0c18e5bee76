"""Concentration bound for Poisson functionals with bounded increments.

For ``F = sum f(X_n)`` over a Poisson process with ``0 <= f <= s``,

    P(F - m >= t) <= exp(-(v / s**2) * g(t s / v)),

where ``m`` and ``v`` are the integrals of ``f`` and ``f**2`` against the
intensity and ``g(u) = (1 + u) log(1 + u) - u``.
"""

import math
from dataclasses import dataclass

from .moments import MomentPair
from .specfun import g_func


@dataclass(frozen=True)
class BoundInput:
    m: float
    v: float
    s: float
    t: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("deviation t must be >= 0")
        if self.m < 0 or self.v <= 0 or self.s <= 0:
            raise ValueError("need m >= 0, v > 0, s > 0")


def concentration_tail(inp: BoundInput) -> float:
    exponent = (inp.v / inp.s**2) * g_func(inp.t * inp.s / inp.v)
    return math.exp(-exponent)


def p_sup(alpha: float, moments: MomentPair, n_max: int) -> float:
    """Bound on ``P(total demand >= alpha * m_N)``."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    return concentration_tail(
        BoundInput(m=moments.m, v=moments.v, s=float(n_max), t=(alpha - 1.0) * moments.m)
    )


def invert_p_sup(target: float, moments: MomentPair, n_max: int, tol: float = 1e-9) -> float:
    """Smallest load factor ``alpha`` whose bound is at most ``target``.

    Useful for dimensioning: ``N0 = alpha * m_N`` subcarriers keep the
    overload probability below ``target``.
    """
    if not 0 < target < 1:
        raise ValueError("target must lie in (0, 1)")
    lo, hi = 1.0, 2.0
    while p_sup(hi, moments, n_max) > target:
        lo, hi = hi, 2.0 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if p_sup(mid, moments, n_max) <= target:
            hi = mid
        else:
            lo = mid
    return hi
