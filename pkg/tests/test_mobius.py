import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from boggio.errors import DomainError, OriginError
from boggio.fraclap import power_profile
from boggio.kernel import green_many
from boggio.mobius import (
    BallAutomorphism,
    annular_bump,
    covariance_residual,
    inversion,
    jacobian_phi,
    kelvin,
    phi,
    phi_norm,
    rotation_residual,
    transfer_residual,
)
from boggio.quadrature import QuadratureSpec

PV = QuadratureSpec(rel_tol=1e-8)


def interior(n, lo=1e-2, hi=0.95):
    return st.lists(st.floats(-1, 1), min_size=n, max_size=n).map(np.array).filter(
        lambda v: lo < np.linalg.norm(v) < hi)


pairs = st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), interior(n), interior(n, 0.0)))


@given(pairs)
def test_phi_is_an_involution_swapping_zero_and_x(args):
    n, x, y = args
    P = BallAutomorphism(x)
    np.testing.assert_allclose(P(P(y)), y, atol=1e-9)
    np.testing.assert_allclose(P(np.zeros(n)), x, atol=1e-12)
    np.testing.assert_allclose(P(x), np.zeros(n), atol=1e-12)


@given(pairs)
def test_phi_norm_formula(args):
    n, x, y = args
    assert phi_norm(x, y) == pytest.approx(np.linalg.norm(phi(x, y)), rel=1e-9, abs=1e-14)
    assert phi_norm(x, y) < 1.0


@given(pairs)
def test_jacobian_matches_finite_differences(args):
    n, x, y = args
    assume(np.linalg.norm(y) < 0.9)
    h = 1e-6
    J = np.column_stack([(phi(x, y + h * e) - phi(x, y - h * e)) / (2 * h) for e in np.eye(n)])
    assert abs(np.linalg.det(J)) == pytest.approx(jacobian_phi(x, y), rel=1e-5)


@given(pairs, st.floats(0.3, 3.0))
def test_kernel_transfer_identity(args, s):
    n, x, y = args
    assume(np.linalg.norm(x - y) > 1e-3)
    assert float(transfer_residual(x, y[None, :], n, s)[0]) < 1e-9


@given(pairs, st.floats(0.3, 3.0))
def test_reciprocity(args, s):
    n, x, y = args
    assume(np.linalg.norm(x - y) > 1e-3)
    a = green_many(x, y[None, :], n, s)[0]
    b = green_many(y, x[None, :], n, s)[0] if np.linalg.norm(y) > 0 else a
    assert a == pytest.approx(b, rel=1e-12)


def test_automorphism_domain():
    with pytest.raises(OriginError):
        BallAutomorphism(np.zeros(2))
    with pytest.raises(DomainError):
        BallAutomorphism(np.array([1.0, 0.0]))
    with pytest.raises(OriginError):
        inversion(np.zeros(3))
    np.testing.assert_allclose(inversion(np.array([0.5, 0.0])), [2.0, 0.0])


def test_kelvin_transform_values():
    u = lambda Y: np.sum(Y, axis=1)
    ks = kelvin(u, 0.75, 1)
    # |y|^(2s-n) u(y/|y|^2) with 2s-n = 1/2
    assert ks(np.array([[2.0]]))[0] == pytest.approx(2.0**0.5 * 0.5)
    with pytest.raises(OriginError):
        ks(np.array([[0.0]]))
    # the transform is an involution
    kk = kelvin(ks, 0.75, 1)
    assert kk(np.array([[0.3]]))[0] == pytest.approx(0.3)


def test_annular_bump_support():
    b = annular_bump(0.3, 0.9)
    r = np.array([[0.1], [0.3], [0.6], [0.9], [1.2]])
    v = b(r)
    assert v[0] == v[1] == v[3] == v[4] == 0.0 and v[2] > 0
    with pytest.raises(DomainError):
        annular_bump(0.9, 0.3)


@pytest.mark.parametrize("sigma", [0.3, 0.7])
def test_kelvin_covariance_line(sigma):
    u = annular_bump(0.3, 0.9)
    for x in (0.5, -0.8, 1.25):
        assert covariance_residual(u, np.array([x]), sigma, 1, PV) < 1e-5


def test_covariance_needs_a_hole():
    with pytest.raises(OriginError):
        covariance_residual(annular_bump(0.3, 0.9), np.zeros(1), 0.5, 1, PV)
    with pytest.raises(DomainError):
        covariance_residual(power_profile(2.0), np.array([0.5]), 0.5, 1, PV)


def test_rotation_invariance_plane():
    u = power_profile(2.5)
    th = 0.7
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    assert rotation_residual(u, np.array([0.3, 0.1]), R, 0.4, 2, 1.0, PV) < 1e-6


def test_translation_invariance_line():
    from boggio.mobius import translation_residual
    from boggio.solver import radial_bump

    u = radial_bump(0.5)
    assert translation_residual(u, np.array([0.1]), np.array([0.3]), 0.6, 1, 0.5, PV) < 1e-6
