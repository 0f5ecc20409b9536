import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

import oracles
from csmaint.analytic import InterferenceLaw, interference_cdf, interference_pdf

LAW = InterferenceLaw(5e-5, 1e-3)
MEDIAN_ORACLE = 6.69111976996509e-11  # oracles.law_median(5e-5)


def test_scale():
    assert LAW.scale == pytest.approx(3.9012e-6, rel=1e-4)


def test_cdf_matches_mpmath():
    for t in np.logspace(-13, -7, 25):
        assert LAW.cdf(t) == pytest.approx(float(oracles.law_cdf(t, 5e-5)), rel=1e-13)


def test_median():
    assert LAW.median() == pytest.approx(MEDIAN_ORACLE, rel=1e-12)
    assert LAW.median() == pytest.approx(6.69e-11, rel=1e-3)
    assert interference_cdf(LAW.median(), LAW) == pytest.approx(0.5, abs=1e-14)


def test_mode_maximises_density():
    t_star = LAW.mode()
    assert t_star == pytest.approx(math.pi**4 * 5e-5**2 * 1e-3 / 24, rel=1e-14)
    assert interference_pdf(t_star, LAW) > interference_pdf(t_star * (1 + 1e-4), LAW)
    assert interference_pdf(t_star, LAW) > interference_pdf(t_star * (1 - 1e-4), LAW)


def test_limits():
    assert LAW.cdf(1e-30) == 0.0 and LAW.pdf(1e-30) == 0.0
    assert LAW.cdf(1e10) == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(ValueError):
        LAW.cdf(0.0)


def test_pdf_is_derivative():
    for t in np.logspace(-12, -7, 11):
        ref = float(oracles.law_pdf_numeric(t, 5e-5))
        assert LAW.pdf(t) == pytest.approx(ref, rel=1e-10)


def test_pdf_integrates_to_one():
    total, _ = integrate.quad(lambda u: LAW.pdf(math.exp(u)) * math.exp(u), -40, 10, limit=400,
                              points=[math.log(LAW.mode())])
    tail = 1 - float(oracles.law_cdf(math.exp(10), 5e-5))
    assert total + tail == pytest.approx(1.0, abs=1e-9)


def test_quantile_inverts_cdf():
    q = np.array([1e-6, 0.01, 0.3, 0.5, 0.9, 0.999])
    np.testing.assert_allclose(LAW.cdf(LAW.quantile(q)), q, rtol=1e-10)


@given(st.floats(-14, -5), st.floats(-14, -5), st.floats(1e-6, 1e-3))
def test_cdf_monotone(a, b, lam):
    law = InterferenceLaw(lam, 1e-3)
    lo, hi = sorted((10**a, 10**b))
    assert law.cdf(lo) <= law.cdf(hi)
    assert law.pdf(lo) >= 0


def test_logpdf_consistent():
    t = np.logspace(-13, -8, 7)
    np.testing.assert_allclose(np.exp(LAW.logpdf(t)), LAW.pdf(t), rtol=1e-12)


def test_erfc_against_mpmath_deep_tail():
    law = InterferenceLaw(1e-4, 1e-3)
    t = 1e-12
    assert law.cdf(t) == pytest.approx(float(mpmath.erfc(law.scale / mpmath.sqrt(t))), rel=1e-12)
