import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from boggio.errors import CoincidentPoints, DomainError, SlowConvergence
from boggio.kernel import (
    BallPoint,
    RadialGreenProfile,
    boggio_argument,
    boggio_q,
    green,
    green_many,
    green_tilde,
    green_tilde_fast,
    green_tilde_integral,
    green_tilde_series,
    h_fast,
    h_profile,
    ivp_residual,
)

orders = st.floats(0.2, 4.0)
dims = st.integers(1, 5)


def ball_point(n, rmax=0.97):
    return st.lists(st.floats(-1, 1), min_size=n, max_size=n).map(np.array).filter(
        lambda v: 1e-3 < np.linalg.norm(v) < rmax)


def mp_green_tilde(r, n, s):
    mp.mp.dps = 30
    return r ** (2 * s - n) * mp.quad(lambda v: (v * v - 1) ** (s - 1) * v ** (1 - n), [1, 1 / mp.mpf(r)])


@given(dims, orders, st.floats(0.5, 0.95))
def test_series_agrees_with_integral(n, s, r):
    a = green_tilde_integral(r, n, s)
    b = float(green_tilde_series(r, RadialGreenProfile.build(n, s)))
    assert abs(a - b) <= 1e-9 * abs(a)


@pytest.mark.parametrize("n,s,r", [(1, 0.5, 0.3), (2, 1.5, 0.7), (3, 0.4, 0.1), (5, 3.7, 0.9), (3, 2.3, 0.02)])
def test_integral_against_mpmath(n, s, r):
    assert green_tilde_integral(r, n, s) == pytest.approx(float(mp_green_tilde(r, n, s)), rel=1e-11)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_integer_order_closed_forms(n):
    r = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(green_tilde_fast(r, n, 1.0), (r ** (2.0 - n) - 1.0) / (n - 2.0), rtol=1e-11)


def test_planar_and_line_closed_forms():
    r = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(green_tilde_fast(r, 2, 1.0), -np.log(r), rtol=1e-11)
    np.testing.assert_allclose(green_tilde_fast(r, 1, 1.0), 1.0 - r, rtol=1e-11)


def test_green_tilde_limits():
    assert green_tilde(0.0, 1, 1.5) == pytest.approx(0.5)
    assert green_tilde(0.0, 2, 0.5) == math.inf
    assert green_tilde(0.0, 2, 1.0) == math.inf
    assert green_tilde(1.0, 3, 0.7) == 0.0
    assert green_tilde(1.5, 3, 0.7) == 0.0
    assert green_tilde_fast(np.array([0.0, 1.0, 2.0]), 1, 1.5).tolist() == [0.5, 0.0, 0.0]


def test_series_at_origin_is_flagged():
    prof = RadialGreenProfile.build(2, 0.5)
    with pytest.raises(SlowConvergence):
        green_tilde_series(0.0, prof)
    with pytest.raises(DomainError):
        green_tilde_integral(-0.1, 2, 0.5)


@given(dims, orders, st.floats(0.01, 0.999))
def test_fast_path_matches_hybrid(n, s, r):
    a = float(green_tilde_fast(r, n, s)[0])
    b = green_tilde(r, n, s)
    assert a == pytest.approx(b, rel=1e-10)


@given(dims, orders, st.floats(1e-3, 0.999))
def test_ivp_residual(n, s, r):
    scale = max(1.0, green_tilde(r, n, s) / r)
    assert ivp_residual(r, n, s) <= 1e-8 * scale


@given(st.integers(1, 4), orders, st.floats(1.0, 6.0))
def test_h_profile_matches_fast_expansion(n, s, t):
    h, power, ht = h_profile(t, n, s)
    assert h == pytest.approx(power * ht)
    fast = float(h_fast(np.array([t * t - 1.0]), n, s)[0])
    assert h == pytest.approx(fast, rel=1e-10, abs=1e-300)


def test_h_profile_vanishes_below_one():
    assert h_profile(0.4, 3, 1.5) == (0.0, 0.0, 0.0)
    h, power, _ = h_profile(0.7, 3, 1.5)
    assert h == 0.0 and power == 0.0
    assert h_profile(1.0, 3, 1.5)[0] == 0.0
    with pytest.raises(DomainError):
        h_profile(-1.0, 3, 1.5)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), ball_point(n), ball_point(n))))
def test_boggio_argument_forms(args):
    n, x, y = args
    assume(np.linalg.norm(x - y) > 1e-3)
    g = boggio_argument(x, y)
    gap = np.linalg.norm(np.linalg.norm(x) * y - x / np.linalg.norm(x))
    assert g == pytest.approx(gap / np.linalg.norm(x - y), rel=1e-10)
    assert g * g - 1.0 == pytest.approx(float(boggio_q(x, y[None, :])[0]), rel=1e-8, abs=1e-12)


def test_boggio_argument_coincident():
    with pytest.raises(CoincidentPoints):
        boggio_argument([0.1, 0.2], [0.1, 0.2])


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), ball_point(n), ball_point(n))), orders)
def test_green_symmetric_and_positive(args, s):
    n, x, y = args
    assume(np.linalg.norm(x - y) > 1e-3)
    a = green(x, y, n, s)
    b = green(y, x, n, s)
    assert a > 0.0
    assert a == pytest.approx(b, rel=1e-12)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(st.just(n), ball_point(n, 0.9), ball_point(n, 0.9))),
       st.floats(0.3, 3.0))
def test_series_and_integral_methods(args, s):
    n, x, y = args
    assume(np.linalg.norm(x - y) > 1e-2)
    a = green(x, y, n, s)
    b = green(x, y, n, s, method="integral")
    assert a == pytest.approx(b, rel=1e-9)


def test_classical_green_functions():
    x, y = np.array([0.3, -0.2, 0.5]), np.array([-0.4, 0.1, 0.2])
    gap = np.linalg.norm(np.linalg.norm(x) * y - x / np.linalg.norm(x))
    want = (1.0 / np.linalg.norm(x - y) - 1.0 / gap) / (4 * math.pi)
    assert green(x, y, 3, 1.0) == pytest.approx(want, rel=1e-12)
    # -u'' on (-1, 1): (1 + min)(1 - max) / 2
    assert green([-0.3], [0.6], 1, 1.0) == pytest.approx(0.7 * 0.4 / 2, rel=1e-12)


def test_green_boundary_and_domain():
    assert green([0.2, 0.1], [1.0, 0.0], 2, 0.7) == 0.0
    with pytest.raises(DomainError):
        green([1.2, 0.0], [0.0, 0.0], 2, 0.7)
    with pytest.raises(CoincidentPoints):
        green([0.1, 0.0], [0.1, 0.0], 2, 0.7)
    with pytest.raises(DomainError):
        green([0.1, 0.0], [0.2, 0.0], 2, 0.7, method="bogus")
    with pytest.raises(DomainError):
        green([0.1, 0.0], [0.2, 0.0, 0.0], 2, 0.7)


def test_green_many_matches_pointwise():
    rng = np.random.default_rng(1)
    x = np.array([0.1, -0.5])
    Y = rng.uniform(-0.7, 0.7, size=(20, 2))
    vals = green_many(x, Y, 2, 1.3)
    for y, v in zip(Y, vals):
        assert v == pytest.approx(green(x, y, 2, 1.3), rel=1e-14)


def test_ballpoint():
    p = BallPoint([3.0, 4.0])
    assert p.norm == 5.0 and p.n == 2
    with pytest.raises(ValueError):
        p.coords[0] = 1.0
    with pytest.raises(DomainError):
        p.require_closed_ball()
    with pytest.raises(DomainError):
        BallPoint.coerce([0.1, 0.2], 3)
