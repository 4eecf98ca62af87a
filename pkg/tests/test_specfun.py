import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from radon_sampling.errors import DomainError
from radon_sampling.specfun import (
    BandSpec,
    GegenbauerParams,
    adaptive_gauss_legendre,
    band_measure,
    band_measure_beta,
    band_threshold,
    gegenbauer_eval,
    gegenbauer_explicit,
    gegenbauer_normalized,
    log_binomial,
    log_gamma,
    log_pochhammer,
    tau,
)


# --------------------------------------------------------------------------
# log_gamma and friends
# --------------------------------------------------------------------------

def test_log_gamma_small_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
    assert log_gamma(0.5) == pytest.approx(0.57236494, abs=1e-8)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_log_gamma_rejects_nonpositive(x):
    with pytest.raises(DomainError):
        log_gamma(x)


def _mp_log_gamma(x):
    with mpmath.workdps(40):
        return mpmath.loggamma(mpmath.mpf(x))


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e6, allow_nan=False))
def test_log_gamma_matches_high_precision(x):
    ref = _mp_log_gamma(x)
    got = log_gamma(x)
    if ref == 0:
        assert got == 0.0
    else:
        assert abs(got - float(ref)) <= 1e-13 * abs(float(ref))


@pytest.mark.parametrize("x", [1 + 1e-12, 1 - 1e-9, 1.0000001, 1.19, 0.81, 2 - 1e-13, 2.0000001, 2.19])
def test_log_gamma_relative_accuracy_next_to_roots(x):
    ref = float(_mp_log_gamma(x))
    assert abs(log_gamma(x) - ref) <= 1e-13 * abs(ref)


def test_log_binomial_half_integer_and_integer():
    assert log_binomial(10, 3) == pytest.approx(math.log(120), rel=1e-14)
    # C(3.5, 2) = 3.5 * 2.5 / 2
    assert log_binomial(3.5, 2) == pytest.approx(math.log(4.375), rel=1e-14)
    with pytest.raises(DomainError):
        log_binomial(2, 5)


def test_log_pochhammer_examples():
    assert log_pochhammer(3, 0) == (1, 0.0)
    sign, val = log_pochhammer(-4, 2)
    assert sign == 1 and val == pytest.approx(math.log(12), rel=1e-15)
    sign, val = log_pochhammer(0.5, 3)
    assert sign == 1 and math.exp(val) == pytest.approx(0.5 * 1.5 * 2.5, rel=1e-14)
    assert log_pochhammer(-2, 4) == (0, -math.inf)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-12.0, max_value=12.0, allow_nan=False).filter(lambda a: abs(a - round(a)) > 1e-3),
       st.integers(min_value=0, max_value=15))
def test_log_pochhammer_matches_direct_product(a, m):
    prod = 1.0
    for i in range(m):
        prod *= a + i
    sign, val = log_pochhammer(a, m)
    assert sign == (1 if prod > 0 else -1)
    assert sign * math.exp(val) == pytest.approx(prod, rel=1e-12)


# --------------------------------------------------------------------------
# Gegenbauer polynomials
# --------------------------------------------------------------------------

def test_degree_zero_is_one():
    for n in (3, 7, 50):
        assert gegenbauer_eval(GegenbauerParams(n, 0), 0.3) == 1.0


@pytest.mark.parametrize("n", [3, 4, 10, 51])
@pytest.mark.parametrize("ell", [0, 1, 2, 7, 30])
def test_value_at_one_is_binomial(n, ell):
    assert gegenbauer_eval(GegenbauerParams(n, ell), 1.0) == pytest.approx(
        math.comb(ell + n - 3, ell), rel=1e-13)


def test_degree_two_at_n10():
    params = GegenbauerParams(10, 2)
    assert gegenbauer_eval(params, 0.0) == pytest.approx(-4.0, rel=1e-15)
    assert gegenbauer_eval(params, 1.0) == pytest.approx(36.0, rel=1e-15)
    # (n(n-2)/2) t^2 - (n-2)/2
    t = 0.37
    assert gegenbauer_eval(params, t) == pytest.approx(40 * t * t - 4, rel=1e-14)


def test_domain_error_outside_interval():
    with pytest.raises(DomainError):
        gegenbauer_eval(GegenbauerParams(5, 3), 1.5)
    with pytest.raises(DomainError):
        gegenbauer_eval(GegenbauerParams(5, 3), np.array([0.0, -1.01]))
    with pytest.raises(DomainError):
        GegenbauerParams(2, 1)


@pytest.mark.parametrize("n", range(4, 65, 3))
def test_recurrence_matches_exact_expansion(n):
    # the expansion summed over Fractions is the oracle; exact roots of P_ell
    # (e.g. n=4, t=-1/2) are compared on the scale of P_ell(1)
    for ell in range(41):
        params = GegenbauerParams(n, ell)
        scale = math.comb(ell + n - 3, ell)
        for t in (-1.0, -0.5, 0.0, 0.3, 1.0):
            exact = float(gegenbauer_explicit(params, t, exact=True))
            got = float(gegenbauer_eval(params, t))
            assert abs(got - exact) <= 1e-10 * abs(exact) + 1e-14 * scale


def test_float_expansion_agrees_at_moderate_degree():
    for n in (4, 10, 33, 64):
        for ell in range(13):
            params = GegenbauerParams(n, ell)
            for t in (-1.0, -0.5, 0.0, 0.3, 1.0):
                ref = gegenbauer_eval(params, t)
                assert gegenbauer_explicit(params, t) == pytest.approx(
                    ref, rel=1e-10, abs=1e-12 * math.comb(ell + n - 3, ell))


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 80), st.integers(0, 40), st.floats(-1.0, 1.0, allow_nan=False))
def test_parity(n, ell, t):
    params = GegenbauerParams(n, ell)
    a = gegenbauer_eval(params, -t)
    b = (-1) ** ell * gegenbauer_eval(params, t)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12 * math.comb(ell + n - 3, ell))


def test_normalized_is_ratio_and_bounded():
    t = np.linspace(-1, 1, 101)
    for n, ell in [(5, 4), (20, 17), (300, 40)]:
        ratio = gegenbauer_normalized(ell, n, t)
        assert np.all(np.abs(ratio) <= 1 + 1e-12)
        ref = gegenbauer_eval(GegenbauerParams(n, ell), t) / math.comb(ell + n - 3, ell)
        assert np.allclose(ratio, ref, rtol=1e-10, atol=1e-14)


def test_orthogonality_against_weight():
    # <P_2, P_4> under (1-t^2)^{(n-3)/2} vanishes
    n = 7
    w = lambda t: (1 - t * t) ** ((n - 3) / 2)
    val, _ = integrate.quad(lambda t: gegenbauer_eval(GegenbauerParams(n, 2), t)
                            * gegenbauer_eval(GegenbauerParams(n, 4), t) * w(t), -1, 1)
    assert abs(val) < 1e-12


# --------------------------------------------------------------------------
# tau and the integrator
# --------------------------------------------------------------------------

def test_tau_values():
    assert tau(2) == pytest.approx(1 / math.pi, rel=1e-14)
    assert tau(3) == pytest.approx(0.5, rel=1e-14)
    assert tau(1000) == pytest.approx(math.sqrt(1000 / (2 * math.pi)), rel=0.01)
    with pytest.raises(DomainError):
        tau(1)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 8, 17, 64, 200, 1000])
def test_tau_normalizes_weight(k):
    # independent route: int (1-t^2)^a dt = B(1/2, a+1)
    a = (k - 3) / 2
    with mpmath.workdps(30):
        integral = float(mpmath.beta(0.5, a + 1))
    assert tau(k) * integral == pytest.approx(1.0, abs=1e-10)


def test_adaptive_gauss_legendre_polynomial_and_smooth():
    assert adaptive_gauss_legendre(lambda x: x ** 3, 0.0, 2.0) == pytest.approx(4.0, rel=1e-14)
    assert adaptive_gauss_legendre(np.exp, -1.0, 1.0) == pytest.approx(math.e - 1 / math.e, rel=1e-14)
    assert adaptive_gauss_legendre(np.sqrt, 0.0, 1.0) == pytest.approx(2 / 3, rel=1e-12)


# --------------------------------------------------------------------------
# Bands
# --------------------------------------------------------------------------

def test_band_measure_endpoints():
    assert band_measure(BandSpec(10, 0.0)) == 1.0
    assert band_measure(BandSpec(10, 1.0)) == 0.0
    with pytest.raises(DomainError):
        BandSpec(10, 1.2)


def test_band_measure_low_dimensions():
    # S^1: arcs, S^2: Archimedes
    T = 0.3
    assert band_measure((2, T)) == pytest.approx(2 * math.acos(T) / math.pi, rel=1e-12)
    assert band_measure((3, T)) == pytest.approx(1 - T, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 10, 100, 1000])
@pytest.mark.parametrize("T", [0.01, 0.1, 0.5, 0.9])
def test_band_measure_two_routes_and_mpmath(n, T):
    with mpmath.workdps(30):
        ref = float(mpmath.betainc((n - 1) / mpmath.mpf(2), 0.5, 0, 1 - mpmath.mpf(T) ** 2,
                                   regularized=True))
    assert band_measure(BandSpec(n, T)) == pytest.approx(ref, rel=1e-10, abs=1e-14)
    assert band_measure_beta(n, T) == pytest.approx(ref, rel=1e-10, abs=1e-14)


def test_half_measure_threshold_scale():
    n = 1000
    T = band_threshold(n, 0.5)
    assert 0.5 / math.sqrt(n) <= T <= 1.5 / math.sqrt(n)


def test_band_threshold_inverse():
    for n in (4, 10, 100, 1000):
        for target in (0.05, 0.25, 0.5, 0.75, 0.95):
            T = band_threshold(n, target)
            assert band_measure(BandSpec(n, T)) == pytest.approx(target, abs=1e-10)
    assert band_threshold(50, 0.25) > band_threshold(50, 0.5)


def test_band_threshold_target_near_one():
    assert band_threshold(10, 1 - 1e-15) < 1e-12
    with pytest.raises(DomainError):
        band_threshold(10, 1.0)
