import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from boggio.errors import DomainError, FitFailure, SlowConvergence
from boggio.fraclap import (
    RadialFunction,
    RadialPolynomial,
    dyda_polynomial,
    dyda_power_fraclap,
    fraclap_pointwise,
    fraclap_s_on_power,
    fraclap_sigma_of_green,
    green_profile_function,
    gsharp,
    gsharp_coefficients_series,
    gsharp_decompose,
    gsharp_multiplier,
    gsharp_prefactor,
    gsharp_terms,
    power_profile,
    radial_poly_laplacian,
    star2_lhs,
    star2_rhs,
)
from boggio.quadrature import QuadratureSpec
from boggio.specfun import gamma_ratio, hyp2f1_terminating

PV = QuadratureSpec(rel_tol=1e-8)
sigmas = st.floats(0.05, 0.95)


def power_constant(n, s):
    return 4.0**s * gamma_ratio((1.0 + s, 0.5 * n + s), (0.5 * n,))


# ---------------------------------------------------------------- polynomials


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=5), st.integers(1, 3),
       st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3))
def test_radial_laplacian_matches_finite_differences(coeffs, n, x):
    p = RadialPolynomial(tuple(coeffs), n)
    x = np.array(x[:n])
    F = lambda y: p(np.linalg.norm(y))
    h = 1e-3
    fd = sum(F(x + h * e) - 2 * F(x) + F(x - h * e) for e in np.eye(n)) / h**2
    assert p.laplacian()(np.linalg.norm(x)) == pytest.approx(fd, abs=1e-4 * max(1.0, max(map(abs, coeffs))))


def test_polynomial_basics():
    p = RadialPolynomial.one_minus_r2_power(3, 2)
    r = np.linspace(0, 1.2, 7)
    np.testing.assert_allclose(p(r), (1 - r * r) ** 3, atol=1e-14)
    assert p.degree == 3
    assert RadialPolynomial((), 2).degree == 0
    # Delta r^2 = 2n; (-Delta)^2 r^4 = 8n(n+2)... checked against the formula
    assert radial_poly_laplacian(RadialPolynomial((0.0, 1.0), 3), 1).coeffs == (-6.0,)
    assert radial_poly_laplacian(RadialPolynomial((0, 0, 1.0), 2), 2).coeffs == (64.0,)
    with pytest.raises(DomainError):
        radial_poly_laplacian(p, 0)
    with pytest.raises(DomainError):
        RadialPolynomial((1.0,), 0)


# ---------------------------------------------------------------- closed forms


@given(st.integers(0, 6), sigmas, st.integers(1, 5), st.floats(0.0, 0.99))
def test_dyda_polynomial_matches_hypergeometric_form(K, sigma, n, r):
    mp.mp.dps = 30
    lead = mp.mpf(4) ** sigma * mp.gamma(n / 2 + sigma) * mp.gamma(K + sigma + 1) / (mp.gamma(n / 2) * mp.factorial(K))
    want = float(lead * mp.hyp2f1(n / 2 + sigma, -K, n / 2, r * r))
    assert dyda_power_fraclap(K, sigma, n, r) == pytest.approx(want, rel=1e-11, abs=1e-12)


def test_half_order_profile_is_one():
    r = np.linspace(0, 0.95, 11)
    np.testing.assert_allclose(dyda_power_fraclap(0, 0.5, 1, r), 1.0, rtol=1e-14)


def test_dyda_domain():
    with pytest.raises(DomainError):
        dyda_power_fraclap(0, 0.5, 1, 1.0)
    with pytest.raises(DomainError):
        dyda_polynomial(-1, 0.5, 1)
    with pytest.raises(DomainError):
        dyda_polynomial(1, 1.0, 1)


@given(st.floats(0.05, 4.5).filter(lambda s: abs(s - round(s)) > 1e-6), st.integers(1, 5))
def test_power_family_constant(s, n):
    p = fraclap_s_on_power(0, s, n)
    assert p.degree == 0
    assert p.coeffs[0] == pytest.approx(power_constant(n, s), rel=1e-12)


def test_flagship_constants():
    assert fraclap_s_on_power(0, 0.5, 1).coeffs[0] == pytest.approx(1.0, rel=1e-15)
    assert fraclap_s_on_power(0, 1.5, 1).coeffs[0] == pytest.approx(6.0, rel=1e-14)
    # integer order: (-Delta)(1-r^2) = 2n, (-Delta)^2 (1-r^2)^2 = 8n(n+2)
    assert fraclap_s_on_power(0, 1.0, 3).coeffs == (6.0,)
    assert fraclap_s_on_power(0, 2.0, 2).coeffs[0] == pytest.approx(64.0)


@given(st.integers(0, 4), st.floats(1.05, 3.95).filter(lambda s: abs(s - round(s)) > 1e-3), st.integers(1, 4))
def test_power_family_degree(K, s, n):
    assert fraclap_s_on_power(K, s, n).degree == K


# ---------------------------------------------------------------- G#


def test_gsharp_terms_match_hypergeometric():
    n, s = 3, 2.3
    r = np.array([0.2, 0.7])
    terms = gsharp_terms(r, n, s, 6)
    for k in range(6):
        w = float(mp.rf(1.5, k) / mp.rf(3, k))
        want = w * hyp2f1_terminating(1.5 + 0.3, -(k + 2), 1.5, r * r)
        np.testing.assert_allclose(terms[k], want, rtol=1e-11)


def test_gsharp_flagship_is_linear():
    r = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(gsharp(r, 1, 1.5), 2.0 - math.pi * r, rtol=1e-10, atol=1e-10)


def test_gsharp_reports_error_and_budget():
    v = gsharp(np.array([0.5]), 2, 2.5, full=True)
    assert v.terms_used > 0 and np.all(v.error_estimate < 1e-9)
    with pytest.raises(SlowConvergence):
        gsharp(0.01, 2, 2.5, k_trunc=1000)
    with pytest.raises(DomainError):
        gsharp(0.5, 2, 0.5)
    with pytest.raises(DomainError):
        gsharp(1.0, 2, 1.5)


@pytest.mark.parametrize("n,s", [(1, 1.5), (2, 2.3), (3, 3.7)])
def test_decomposition(n, s):
    dec = gsharp_decompose(n, s)
    assert dec.residual <= 1e-8
    m, sigma = dec.m, dec.sigma
    assert dec.multiplier == 2 * m * gamma_ratio((m + sigma, n / 2), (n / 2 + sigma, float(m)))
    np.testing.assert_allclose(dec.a, gsharp_coefficients_series(n, s), atol=1e-8)
    r = np.linspace(0.1, 0.9, 5)
    np.testing.assert_allclose(dec(r), gsharp(r, n, s), rtol=1e-8)


def test_decomposition_flagship_coefficients():
    dec = gsharp_decompose(1, 1.5)
    assert dec.multiplier == pytest.approx(math.pi, rel=1e-14)
    assert dec.a[0] == pytest.approx(2.0 - math.pi, abs=1e-10)


def test_decomposition_failure_is_raised():
    with pytest.raises(FitFailure):
        gsharp_decompose(2, 2.5, tol=0.0)


@given(st.integers(1, 12), st.integers(0, 8), st.integers(0, 30), st.integers(0, 40))
def test_star2_identity_exact(n, m, ell, extra):
    k = m + extra
    assert star2_lhs(n, k, ell, m) == star2_rhs(n, k, ell, m)
    assert isinstance(star2_lhs(n, k, ell, m), Fraction)


# ---------------------------------------------------------------- PV evaluator


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("sigma,K", [(0.3, 0), (0.5, 1), (0.7, 2)])
def test_pointwise_matches_closed_form(n, sigma, K):
    u = power_profile(sigma + K)
    for r in (0.0, 0.4):
        x = np.zeros(n)
        x[0] = r
        got = fraclap_pointwise(u, x, sigma, n, PV)
        assert got == pytest.approx(dyda_power_fraclap(K, sigma, n, r), rel=1e-6)


def test_pointwise_outside_support():
    # (-Delta)^sigma (1-|y|^2)_+^sigma at |x| = 1.5, n = 1, against direct quadrature
    from scipy.integrate import quad

    sigma, x = 0.5, 1.5
    u = power_profile(sigma)
    c = 1.0 / math.pi  # C(1, 1/2)
    want = -c * quad(lambda y: (1 - y * y) ** sigma / abs(x - y) ** 2, -1, 1, epsabs=1e-13)[0]
    got = fraclap_pointwise(u, np.array([x]), sigma, 1, PV)
    assert got == pytest.approx(want, rel=1e-7)


def test_pointwise_finite_difference_hessian():
    u = power_profile(1.3)
    plain = lambda Y: u(Y)  # hides the analytic Hessian
    x = np.array([0.2, 0.1])
    a = fraclap_pointwise(u, x, 0.4, 2, PV)
    b = fraclap_pointwise(plain, x, 0.4, 2, PV, support_radius=1.0, kinks=(1.0,))
    assert a == pytest.approx(b, rel=1e-6)


def test_pointwise_rejects():
    u = power_profile(0.5)
    with pytest.raises(DomainError):
        fraclap_pointwise(u, np.array([0.1]), 1.0, 1)
    with pytest.raises(DomainError):
        fraclap_pointwise(u, np.array([1.0]), 0.5, 1)
    with pytest.raises(DomainError):
        fraclap_pointwise(u, np.array([0.9]), 0.5, 1, QuadratureSpec(pv_inner_radius=0.2))


def test_radial_function_hessian():
    u = power_profile(2.0)
    x = np.array([0.3, 0.4])
    H = u.hessian(x)
    # (1-r^2)^2: Hessian = -4(1-r^2) I + 8 x x^T
    np.testing.assert_allclose(H, -4 * (1 - 0.25) * np.eye(2) + 8 * np.outer(x, x), atol=1e-13)
    assert RadialFunction(lambda r: r).hessian(x) is None


def test_fractional_layer_of_green_profile():
    r = 0.5
    closed = fraclap_sigma_of_green(np.array([r]), 1, 1.5)[0]
    u = green_profile_function(1, 1.5)
    got = fraclap_pointwise(u, np.array([r]), 0.5, 1, PV)
    assert got == pytest.approx(closed, rel=1e-6)
    assert gsharp_prefactor(1, 1.5) * gsharp(r, 1, 1.5) == pytest.approx(closed)
    assert gsharp_multiplier(1, 1.5) == pytest.approx(math.pi)
