import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from ofdmaloss.specfun import (XI, g_func, lognormal_attenuation_cdf,
                               lognormal_attenuation_pdf, normal_cdf)

MU, SIGMA = 6.0, math.sqrt(10.0)


def erf_series(x, terms=30):
    return 2 / math.sqrt(math.pi) * math.fsum(
        (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1)) for n in range(terms))


def test_normal_cdf_examples():
    assert normal_cdf(0.0) == 0.5
    assert abs(normal_cdf(40.0) - 1.0) <= 1e-15
    x = 1.959963985
    oracle = 0.5 * (1 + erf_series(x / math.sqrt(2)))
    assert abs(normal_cdf(x) - oracle) <= 1e-12
    assert abs(normal_cdf(x) - 0.975) <= 1e-9


def test_normal_cdf_accuracy_against_mpmath():
    for x in np.linspace(-8, 8, 161):
        exact = float(mpmath.ncdf(x))
        assert abs(normal_cdf(x) - exact) <= 1e-12


def test_normal_cdf_symmetry_and_monotone():
    x = np.linspace(-8, 8, 1001)
    assert np.all(np.abs(normal_cdf(x) + normal_cdf(-x) - 1) <= 1e-14)
    assert np.all(np.diff(normal_cdf(x)) >= 0)


def test_g_func_examples():
    assert g_func(0.0) == 0.0
    assert g_func(1.0) == pytest.approx(2 * math.log(2) - 1, rel=1e-14)
    assert g_func(1e-8) == pytest.approx(5e-17, rel=0.01)


@pytest.mark.parametrize("t", np.logspace(-12, 6, 55))
def test_g_func_relative_accuracy(t):
    mpmath.mp.dps = 50
    exact = (1 + mpmath.mpf(t)) * mpmath.log1p(mpmath.mpf(t)) - mpmath.mpf(t)
    assert abs(g_func(t) / float(exact) - 1) <= 1e-12


def test_g_func_rejects_negative():
    with pytest.raises(ValueError):
        g_func(-1e-3)


def test_g_func_convex_nonnegative():
    t = np.linspace(0, 50, 5001)
    g = g_func(t)
    assert np.all(g >= 0)
    assert np.all(np.diff(g, 2) >= -1e-10)


def test_pdf_at_median():
    y = 10 ** (MU / 10)
    assert lognormal_attenuation_pdf(y, MU, SIGMA) == pytest.approx(
        XI / (math.sqrt(2 * math.pi) * SIGMA * y), rel=1e-14)


def test_pdf_at_one_symbolic():
    mpmath.mp.dps = 40
    xi = 10 / mpmath.log(10)
    sigma = mpmath.sqrt(10)
    exact = xi / (mpmath.sqrt(2 * mpmath.pi) * sigma) * mpmath.exp(-(0 - 6) ** 2 / (2 * sigma**2))
    assert lognormal_attenuation_pdf(1.0, MU, SIGMA) == pytest.approx(float(exact), rel=1e-13)


def test_pdf_normalized():
    # adaptive quadrature in log space, independent of ofdmaloss.quadrature
    val, _ = integrate.quad(lambda u: lognormal_attenuation_pdf(math.exp(u), MU, SIGMA) * math.exp(u),
                            -60, 60, limit=200, epsabs=1e-13)
    assert abs(val - 1) <= 1e-8


def test_pdf_cdf_reject_nonpositive():
    with pytest.raises(ValueError):
        lognormal_attenuation_pdf(0.0, MU, SIGMA)
    with pytest.raises(ValueError):
        lognormal_attenuation_cdf(-1.0, MU, SIGMA)


def test_cdf_examples():
    assert lognormal_attenuation_cdf(10 ** (MU / 10), MU, SIGMA) == pytest.approx(0.5, abs=1e-15)
    assert lognormal_attenuation_cdf(1e-30, MU, SIGMA) < 1e-100


@pytest.mark.parametrize("y", [0.5, 1.0, 2.0, 5.0])
def test_cdf_derivative_matches_pdf(y):
    h = 1e-5 * y
    fd = (lognormal_attenuation_cdf(y + h, MU, SIGMA) - lognormal_attenuation_cdf(y - h, MU, SIGMA)) / (2 * h)
    assert fd == pytest.approx(lognormal_attenuation_pdf(y, MU, SIGMA), rel=1e-6)


# above ~15 dB the CDF is within 1e-5 of 1 and the difference quotient cancels
@given(st.floats(min_value=-4, max_value=1.5))
def test_cdf_derivative_log_grid(log10_y):
    y = 10.0**log10_y
    h = 1e-5 * y
    fd = (lognormal_attenuation_cdf(y + h, MU, SIGMA) - lognormal_attenuation_cdf(y - h, MU, SIGMA)) / (2 * h)
    pdf = lognormal_attenuation_pdf(y, MU, SIGMA)
    assert fd == pytest.approx(pdf, rel=1e-6, abs=1e-300)
