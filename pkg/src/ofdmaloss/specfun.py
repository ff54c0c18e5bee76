"""Special functions shared by the analytic computations.

``normal_cdf`` is the standard normal distribution function, i.e. the
integral from minus infinity. Engineering texts often write ``Q`` for the
upper tail; the closed forms in :mod:`ofdmaloss.moments` use the CDF.

Shadowing convention: the attenuation is ``S = 10**(Z/10)`` with
``Z ~ Normal(mu_db, sigma_db**2)``; the gain is ``G = 1/S``.
"""

import numpy as np
from scipy import special

XI = 10.0 / np.log(10.0)

# g(t) switches from its power series to the closed form at this point
_G_SERIES_CUTOFF = 0.1
_G_SERIES_TERMS = 20


def normal_cdf(x):
    """Standard normal CDF, ``P(N(0, 1) <= x)``, via ``erfc``."""
    return special.ndtr(x)


def log_normal_cdf(x):
    """Logarithm of :func:`normal_cdf`, accurate deep in the lower tail."""
    return special.log_ndtr(x)


def g_func(t):
    """Return ``(1 + t) * log(1 + t) - t`` for ``t >= 0``.

    For small ``t`` the closed form cancels catastrophically, so the
    alternating series ``sum_{k>=2} (-t)**k / (k (k - 1))`` is used instead.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise ValueError("g_func is defined for t >= 0 only")
    small = t_arr < _G_SERIES_CUTOFF
    ts = np.where(small, t_arr, 0.0)
    series = np.zeros_like(t_arr)
    # sum smallest terms first
    for k in range(_G_SERIES_TERMS + 1, 1, -1):
        series += (-ts) ** k / (k * (k - 1))
    tl = np.where(small, 1.0, t_arr)
    closed = (1.0 + tl) * np.log1p(tl) - tl
    out = np.where(small, series, closed)
    return out if out.ndim else float(out)


def lognormal_attenuation_pdf(y, mu_db, sigma_db):
    """Density of the shadowing attenuation ``S`` at ``y > 0``."""
    y = np.asarray(y, dtype=float)
    if sigma_db <= 0:
        raise ValueError("sigma_db must be positive")
    if np.any(y <= 0):
        raise ValueError("attenuation must be positive")
    z = (10.0 * np.log10(y) - mu_db) / sigma_db
    out = XI / (np.sqrt(2.0 * np.pi) * sigma_db * y) * np.exp(-0.5 * z * z)
    return out if out.ndim else float(out)


def lognormal_attenuation_cdf(y, mu_db, sigma_db):
    """``P(S <= y)`` for the shadowing attenuation."""
    y = np.asarray(y, dtype=float)
    if sigma_db <= 0:
        raise ValueError("sigma_db must be positive")
    if np.any(y <= 0):
        raise ValueError("attenuation must be positive")
    out = normal_cdf((10.0 * np.log10(y) - mu_db) / sigma_db)
    return out if np.ndim(out) else float(out)


def gain_cdf_db(gain_db, mu_db, sigma_db):
    """``P(G <= u)`` for ``G = 1/S``, with ``u`` given in dB.

    Works on dB values so that ``u = 0`` and ``u = inf`` map to ``-inf``
    and ``+inf`` without overflow.
    """
    return normal_cdf((np.asarray(gain_db, dtype=float) + mu_db) / sigma_db)
