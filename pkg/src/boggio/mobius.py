"""Mobius geometry of the unit ball and covariance checks for the kernel."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, OriginError
from .fraclap import RadialFunction, fraclap_pointwise
from .kernel import green_many, green_tilde_fast
from .quadrature import DEFAULT_SPEC, QuadratureSpec
from .specfun import FracOrder, boggio_constant

__all__ = [
    "inversion",
    "BallAutomorphism",
    "phi",
    "phi_norm",
    "jacobian_phi",
    "kelvin",
    "annular_bump",
    "covariance_residual",
    "translation_residual",
    "rotation_residual",
    "transfer_residual",
]


def _coords(p) -> np.ndarray:
    return np.asarray(getattr(p, "coords", p), dtype=float)


def inversion(x) -> np.ndarray:
    """x / |x|^2 (works row-wise on an (m, n) array)."""
    x = _coords(x)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    if np.any(r2 == 0.0):
        raise OriginError("inversion is undefined at the origin")
    return x / r2


def _gap2(x: np.ndarray, Y: np.ndarray, x2: float) -> np.ndarray:
    """| |x| y - x/|x| |^2 = |x-y|^2 + (1-|x|^2)(1-|y|^2), free of cancellation."""
    d = Y - x
    return np.sum(d * d, axis=-1) + (1.0 - x2) * (1.0 - np.sum(Y * Y, axis=-1))


@dataclass(frozen=True)
class BallAutomorphism:
    """The involution phi_x of the unit ball that swaps 0 and x."""

    base: np.ndarray
    norm2: float = field(init=False)
    one_minus: float = field(init=False)
    star: np.ndarray = field(init=False)

    def __post_init__(self):
        x = _coords(self.base).reshape(-1).copy()
        x2 = float(x @ x)
        if x2 == 0.0:
            raise OriginError("phi_x needs x != 0")
        if x2 >= 1.0:
            raise DomainError("phi_x needs |x| < 1")
        x.setflags(write=False)
        star = x / x2
        star.setflags(write=False)
        object.__setattr__(self, "base", x)
        object.__setattr__(self, "norm2", x2)
        object.__setattr__(self, "one_minus", 1.0 - x2)
        object.__setattr__(self, "star", star)

    @property
    def n(self) -> int:
        return self.base.size

    def __call__(self, y) -> np.ndarray:
        Y = _coords(y)
        d = Y - self.star
        d2 = np.sum(d * d, axis=-1, keepdims=True)
        return (self.base + self.one_minus * d / d2) / self.norm2

    def norm(self, y):
        """|phi_x(y)| via |x-y| / | |x| y - x/|x| |."""
        Y = _coords(y)
        d = Y - self.base
        return np.sqrt(np.sum(d * d, axis=-1) / _gap2(self.base, Y, self.norm2))

    def jacobian(self, y):
        """(1-|x|^2)^n / ( |x|^2|y|^2 - 2 x.y + 1 )^n."""
        Y = _coords(y)
        return (self.one_minus / _gap2(self.base, Y, self.norm2)) ** self.n


def _auto(x) -> BallAutomorphism:
    return x if isinstance(x, BallAutomorphism) else BallAutomorphism(_coords(x))


def phi(x, y) -> np.ndarray:
    return _auto(x)(y)


def phi_norm(x, y):
    return _auto(x).norm(y)


def jacobian_phi(x, y):
    return _auto(x).jacobian(y)


def kelvin(u: Callable, order, n: int) -> Callable:
    """The order-s Kelvin transform y -> |y|^(2s-n) u(y/|y|^2)."""
    e = 2.0 * FracOrder.coerce(order).s - n

    def u_star(Y):
        Y = np.atleast_2d(_coords(Y))
        r2 = np.sum(Y * Y, axis=1)
        if np.any(r2 == 0.0):
            raise OriginError("the Kelvin transform is undefined at the origin")
        return r2 ** (0.5 * e) * np.asarray(u(Y / r2[:, None]), dtype=float)

    return u_star


def annular_bump(r_in: float, r_out: float) -> RadialFunction:
    """C-infinity radial bump exp(-1/(1-t^2)) supported in r_in < |y| < r_out."""
    if not 0.0 <= r_in < r_out:
        raise DomainError("need 0 <= r_in < r_out")
    c = 0.5 * (r_in + r_out)
    w = 0.5 * (r_out - r_in)

    def f(r):
        t = (np.asarray(r, dtype=float) - c) / w
        inside = np.abs(t) < 1.0
        out = np.zeros_like(t)
        ti = t[inside]
        out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
        return out

    return RadialFunction(f, None, None, r_out, (r_in, r_out) if r_in > 0 else (r_out,))


def covariance_residual(
    u: RadialFunction,
    x,
    sigma: float,
    n: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    r_in: Optional[float] = None,
) -> float:
    """| (-Delta)^sigma[u*](x) - |x|^(-n-2sigma) (-Delta)^sigma u(x/|x|^2) |.

    ``u`` must vanish near the origin (support in ``r_in < |y| < u.support``)
    so that its Kelvin transform is bounded with compact support.
    """
    x = _coords(x).reshape(n)
    rx2 = float(x @ x)
    if rx2 == 0.0:
        raise OriginError("the covariance check needs x != 0")
    if r_in is None:
        r_in = min(k for k in u.kinks if k > 0.0) if len(u.kinks) > 1 else None
    if not r_in:
        raise DomainError("u must vanish on a ball around the origin")
    r_out = u.support
    u_star = kelvin(u, sigma, n)
    lhs = fraclap_pointwise(u_star, x, sigma, n, spec, support_radius=1.0 / r_in,
                            kinks=(1.0 / r_out, 1.0 / r_in))
    rhs = fraclap_pointwise(u, x / rx2, sigma, n, spec, support_radius=r_out,
                            kinks=tuple(u.kinks))
    return abs(lhs - rx2 ** (-0.5 * n - sigma) * rhs)


def translation_residual(u: Callable, x, shift, sigma: float, n: int, support: float,
                         spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """(-Delta)^sigma commutes with translation; ``u`` is smooth with support in B_support."""
    x = _coords(x).reshape(n)
    a = _coords(shift).reshape(n)

    def moved(Y):
        return u(np.atleast_2d(Y) - a)

    lhs = fraclap_pointwise(moved, x + a, sigma, n, spec,
                            support_radius=support + float(np.linalg.norm(a)), kinks=())
    rhs = fraclap_pointwise(u, x, sigma, n, spec, support_radius=support, kinks=())
    return abs(lhs - rhs)


def rotation_residual(u: Callable, x, rotation, sigma: float, n: int, support: float,
                      spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """(-Delta)^sigma commutes with rotations: compare at x for u o R and at R x for u."""
    x = _coords(x).reshape(n)
    R = np.asarray(rotation, dtype=float).reshape(n, n)

    def rotated(Y):
        return u(np.atleast_2d(Y) @ R.T)

    lhs = fraclap_pointwise(rotated, x, sigma, n, spec, support_radius=support, kinks=())
    rhs = fraclap_pointwise(u, R @ x, sigma, n, spec, support_radius=support, kinks=())
    return abs(lhs - rhs)


def transfer_residual(x, Y, n: int, order) -> np.ndarray:
    """Relative error of | |x|y - x/|x| |^(2s-n) G_s(0, phi_x(y)) = G_s(x, y).

    ``Y`` is an (m, n) array of interior points distinct from ``x``.
    """
    order = FracOrder.coerce(order)
    auto = _auto(x)
    Y = np.atleast_2d(_coords(Y))
    lhs = (
        _gap2(auto.base, Y, auto.norm2) ** (0.5 * (2.0 * order.s - n))
        * boggio_constant(order, n)
        * green_tilde_fast(auto.norm(Y), n, order)
    )
    rhs = green_many(auto.base, Y, n, order)
    return np.abs(lhs - rhs) / np.abs(rhs)
