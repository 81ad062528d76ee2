import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisemod.model import ConfigurationError, DomainError
from noisemod.specfun import (
    chi2_cdf_even,
    chi2_sf_even,
    gauss_laguerre,
    poisson_pmf,
    q_function,
)
from oracles import gammainc_lower, q_taylor


def test_chi2_median_two_dof():
    assert chi2_cdf_even(2 * math.log(2), 1) == pytest.approx(0.5, abs=1e-15)


def test_chi2_at_origin():
    assert chi2_cdf_even(0.0, 7) == 0.0
    assert chi2_sf_even(0.0, 7) == 1.0


def test_chi2_matches_incomplete_gamma_oracle():
    # P(5, 5) from the series / continued-fraction oracle
    assert chi2_cdf_even(10.0, 5) == pytest.approx(0.5595067149347878, rel=1e-12)
    assert chi2_cdf_even(10.0, 5) == pytest.approx(gammainc_lower(5, 5.0), rel=1e-12)


@pytest.mark.parametrize("bad", [(-1.0, 3), (1.0, 0), (1.0, 2.5), (float("nan"), 2)])
def test_chi2_domain_errors(bad):
    with pytest.raises(DomainError):
        chi2_cdf_even(*bad)


@pytest.mark.parametrize("n", [1, 2, 5, 13, 20])
def test_chi2_direct_sum_small_n(n):
    for x in [0.1, 1.0, 5.0, 2.0 * n, 40.0, 90.0]:
        lam = x / 2
        direct = 1.0 - math.exp(-lam) * sum(lam**k / math.factorial(k) for k in range(n))
        got = chi2_cdf_even(x, n)
        if direct > 1e-3:
            assert got == pytest.approx(direct, rel=1e-12)
        else:
            # the subtraction in the direct sum loses digits; use the oracle
            assert got == pytest.approx(gammainc_lower(n, lam), rel=1e-12)


@pytest.mark.parametrize("ratio", [0.5, 0.9, 1.0, 1.05, 1.5])
def test_chi2_large_n_no_overflow(ratio):
    n = 1000
    x = 2 * n * ratio
    ref = float(mpmath.gammainc(n, 0, x / 2, regularized=True))
    assert chi2_cdf_even(x, n) == pytest.approx(ref, rel=1e-9)
    ref_sf = float(mpmath.gammainc(n, x / 2, mpmath.inf, regularized=True))
    assert chi2_sf_even(x, n) == pytest.approx(ref_sf, rel=1e-9)


def test_chi2_deep_tails_keep_relative_accuracy():
    mpmath.mp.dps = 30
    lower = float(mpmath.gammainc(50, 0, 5, regularized=True))
    upper = float(mpmath.gammainc(50, 400, mpmath.inf, regularized=True))
    assert chi2_cdf_even(10.0, 50) == pytest.approx(lower, rel=1e-12)
    assert chi2_sf_even(800.0, 50) == pytest.approx(upper, rel=1e-12)


def test_chi2_vectorised_shape():
    x = np.linspace(0, 50, 12).reshape(3, 4)
    out = chi2_cdf_even(x, 10)
    assert out.shape == (3, 4)
    assert np.allclose(out + chi2_sf_even(x, 10), 1.0, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.0, 500.0, allow_nan=False),
    st.floats(0.0, 50.0, allow_nan=False),
    st.integers(1, 200),
)
def test_chi2_monotone_in_x(x, dx, n):
    assert chi2_cdf_even(x + dx, n) >= chi2_cdf_even(x, n)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 300.0), st.integers(1, 150))
def test_chi2_decreasing_in_n(x, n):
    a, b = chi2_cdf_even(x, n), chi2_cdf_even(x, n + 1)
    assert b <= a
    if 1e-300 < a < 1.0 - 1e-15:
        assert b < a


def test_poisson_pmf_matches_mpmath():
    mpmath.mp.dps = 40
    for k, lam in [(0, 3.0), (1, 0.5), (15, 14.2), (16, 30.0), (999, 1000.0), (400, 350.5)]:
        ref = mpmath.e ** (-lam) * mpmath.mpf(lam) ** k / mpmath.factorial(k)
        assert poisson_pmf(k, lam) == pytest.approx(float(ref), rel=1e-14)


def test_q_function_values():
    assert q_function(0.0) == 0.5
    assert 0.0 <= q_function(40.0) < 1e-300
    assert q_function(3.0902) == pytest.approx(1.0e-3, abs=1e-6)
    assert q_function(3.0902) == pytest.approx(q_taylor(3.0902), rel=1e-12)


@given(st.floats(-30.0, 30.0))
def test_q_function_symmetry(x):
    assert q_function(x) + q_function(-x) == pytest.approx(1.0, abs=1e-14)


def test_q_function_tail_relative_accuracy():
    mpmath.mp.dps = 40
    for x in (5.0, 10.0, 20.0, 37.0):
        ref = float(mpmath.erfc(x / mpmath.sqrt(2)) / 2)
        assert q_function(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("bad", [float("inf"), float("-inf"), float("nan")])
def test_q_function_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        q_function(bad)


@pytest.mark.parametrize("order", [2, 8, 32, 96, 128, 256])
def test_laguerre_low_moments(order):
    rule = gauss_laguerre(order)
    assert rule.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.dot(rule.weights, rule.nodes) == pytest.approx(1.0, abs=1e-12)
    assert np.dot(rule.weights, rule.nodes**2) == pytest.approx(2.0, abs=1e-10)


@pytest.mark.parametrize("order", [8, 20, 64, 200])
def test_laguerre_moments_to_five(order):
    rule = gauss_laguerre(order)
    for k in range(6):
        assert np.dot(rule.weights, rule.nodes**k) == pytest.approx(math.factorial(k), rel=1e-9)


@pytest.mark.parametrize("order", [3, 10, 50, 150])
def test_laguerre_rule_shape(order):
    rule = gauss_laguerre(order)
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    assert np.all(rule.nodes > 0)
    assert rule.order == order


def test_laguerre_exact_to_degree_2n_minus_1():
    rule = gauss_laguerre(6)
    assert np.dot(rule.weights, rule.nodes**11) == pytest.approx(math.factorial(11), rel=1e-12)


def test_laguerre_matches_numpy_nodes():
    rule = gauss_laguerre(40)
    x, w = np.polynomial.laguerre.laggauss(40)
    assert np.allclose(rule.nodes, x, rtol=1e-12)
    assert np.allclose(rule.weights, w, rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("order", [1, 0, 257, 2.5, True])
def test_laguerre_order_range(order):
    with pytest.raises(ConfigurationError):
        gauss_laguerre(order)
