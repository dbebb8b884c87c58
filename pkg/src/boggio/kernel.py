"""Boggio's Green function on the unit ball and its radial profile.

Two independent routes evaluate the radial profile

    Gt(r) = r**(2s-n) * int_1^{1/r} (v^2-1)**(s-1) v**(1-n) dv,

namely adaptive quadrature of the integral and the power series
``sum_k c_k (1-r^2)**(k+s)`` with ``c_k = (n/2)_k / (2 (s)_{k+1})``.

Bulk evaluation (the solver, scans) goes through :func:`h_fast`, which
computes ``h(t) = int_1^t (v^2-1)**(s-1) v**(1-n) dv`` from the same series for
``t <= 2`` and from the binomial expansion of ``(1 - v**-2)**(s-1)`` for
``t > 2``.  Both expansions converge geometrically there (ratios 3/4 and 1/4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import CoincidentPoints, DomainError, SlowConvergence
from .quadrature import QuadratureSpec, integrate_1d
from .specfun import FracOrder, boggio_constant

__all__ = [
    "BallPoint",
    "RadialGreenProfile",
    "KERNEL_SPEC",
    "green_tilde_integral",
    "green_tilde_series",
    "green_tilde",
    "green_tilde_fast",
    "h_fast",
    "boggio_argument",
    "boggio_q",
    "green",
    "green_many",
    "h_profile",
    "ivp_residual",
]

KERNEL_SPEC = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-300, max_subdivisions=4000)
DEFAULT_R_STAR = 0.5
_SERIES_MAX_TERMS = 200000


@dataclass(frozen=True)
class BallPoint:
    """A point of R^n with its cached Euclidean norm."""

    coords: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coords, dtype=float)).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "norm", float(np.linalg.norm(c)))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def require_closed_ball(self) -> "BallPoint":
        if self.norm > 1.0:
            raise DomainError(f"point {self.coords} lies outside the closed unit ball")
        return self

    @classmethod
    def coerce(cls, p, n: Optional[int] = None) -> "BallPoint":
        bp = p if isinstance(p, cls) else cls(p)
        if n is not None and bp.n != n:
            raise DomainError(f"expected a point of R^{n}, got dimension {bp.n}")
        return bp


def _series_coeffs(n: int, s: float, count: int) -> np.ndarray:
    c = np.empty(count)
    c[0] = 1.0 / (2.0 * s)
    for k in range(count - 1):
        c[k + 1] = c[k] * (0.5 * n + k) / (s + k + 1.0)
    return c


def _tail_ratio(n: int, s: float, K: int, u: float) -> float:
    """Supremum of consecutive term ratios beyond index K at argument u."""
    return u * max(1.0, (0.5 * n + K) / (s + K + 1.0))


@dataclass(frozen=True)
class RadialGreenProfile:
    """Truncated series for Gt_s valid on ``r >= r_min``.

    ``coeffs[k] = (n/2)_k / (2 (s)_{k+1})``; ``tail_bound`` bounds the relative
    size of the discarded remainder for every ``r`` in ``[r_min, 1]``.
    """

    n: int
    order: FracOrder
    coeffs: np.ndarray
    K: int
    tail_bound: float
    r_min: float

    @classmethod
    def build(cls, n: int, order, r_min: float = DEFAULT_R_STAR, tol: float = 1e-17):
        order = FracOrder.coerce(order)
        if not (0.0 < r_min <= 1.0):
            raise DomainError("r_min must lie in (0, 1]")
        s = order.s
        u = 1.0 - r_min * r_min
        # grow the coefficient table until the geometric tail bound, relative
        # to the leading term c_0 u^s, drops below tol
        count = 64
        while True:
            c = _series_coeffs(n, s, count)
            K = count - 1
            q = _tail_ratio(n, s, K, u)
            if q < 1.0:
                tail = c[K] * u**K * q / (1.0 - q) / c[0]
                if tail <= tol or u == 0.0:
                    break
            if count >= _SERIES_MAX_TERMS:
                raise SlowConvergence(
                    f"series for Gt_s (n={n}, s={s}) needs more than {count} terms at r={r_min}"
                )
            count *= 2
        c.setflags(write=False)
        return cls(n, order, c, K, tail, r_min)

    def __call__(self, r):
        return green_tilde_series(r, self)


@lru_cache(maxsize=256)
def _profile(n: int, s: float, r_min: float = DEFAULT_R_STAR) -> RadialGreenProfile:
    return RadialGreenProfile.build(n, FracOrder(s), r_min)


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r > 1.0):
        raise DomainError("radius must lie in (0, 1]")
    return r


def green_tilde_integral(r: float, n: int, order, spec: QuadratureSpec = KERNEL_SPEC) -> float:
    """Gt_s(r) by adaptive quadrature of its defining integral.

    The integral is taken in ``d = v - 1`` so that ``v^2 - 1 = d (2 + d)``
    keeps full relative accuracy next to ``v = 1``; for ``s < 1`` the endpoint
    power ``d**(s-1)`` is removed by substitution.
    """
    order = FracOrder.coerce(order)
    r = float(_check_r(r))
    if r == 1.0:
        return 0.0
    s = order.s
    upper = (1.0 - r) / r  # = 1/r - 1 without cancellation

    def integrand(d):
        return (d * (2.0 + d)) ** (s - 1.0) * (1.0 + d) ** (1.0 - n)

    sp = spec.with_(singularity_exponent=(s - 1.0) if s < 1.0 else None)
    res = integrate_1d(integrand, 0.0, upper, sp).check()
    return r ** (2.0 * s - n) * res.value


def green_tilde_series(r, profile: RadialGreenProfile):
    """Gt_s(r) from the truncated power series in ``1 - r^2``.

    Radii below ``profile.r_min`` extend the series on the fly and raise
    :class:`SlowConvergence` when the geometric tail bound cannot be met
    (always the case at ``r = 0``).
    """
    r_arr = _check_r(r) if np.ndim(r) else np.asarray(float(r))
    if np.ndim(r) == 0 and not (0.0 < float(r) <= 1.0):
        if float(r) == 0.0:
            raise SlowConvergence("the series converges only algebraically at r = 0")
        raise DomainError("radius must lie in (0, 1]")
    n, s = profile.n, profile.order.s
    u = (1.0 - r_arr) * (1.0 + r_arr)
    if np.all(r_arr >= profile.r_min):
        coeffs = profile.coeffs
    else:
        umax = float(np.max(u))
        count = profile.K + 1
        while True:
            count *= 2
            if count > _SERIES_MAX_TERMS:
                raise SlowConvergence(
                    f"series for Gt_s needs more than {_SERIES_MAX_TERMS} terms at r={1 - umax}"
                )
            coeffs = _series_coeffs(n, s, count)
            q = _tail_ratio(n, s, count - 1, umax)
            if q < 1.0 and coeffs[-1] * umax ** (count - 1) * q / (1.0 - q) <= 1e-17 * coeffs[0]:
                break
    total = np.polynomial.polynomial.polyval(u, coeffs) * u**s
    return total if total.ndim else float(total)


def green_tilde(
    r, n: int, order, spec: QuadratureSpec = KERNEL_SPEC, *, r_star: float = DEFAULT_R_STAR
) -> float:
    """Gt_s(r): series for ``r >= r_star``, quadrature below.

    ``r = 0`` returns the limit ``1/(2s-n)`` when ``2s > n`` and ``inf``
    otherwise.
    """
    order = FracOrder.coerce(order)
    r = float(r)
    if r == 0.0:
        return 1.0 / (2.0 * order.s - n) if 2.0 * order.s > n else math.inf
    if r > 1.0:
        return 0.0
    if r >= r_star:
        return green_tilde_series(r, _profile(n, order.s, r_star))
    return green_tilde_integral(r, n, order, spec)


# ---------------------------------------------------------------------------
# vectorised kernel core

@lru_cache(maxsize=256)
def _far_table(n: int, s: float, terms: int = 48):
    """Coefficients of the expansion of h(t) - h(2) for t > 2."""
    j = np.arange(terms)
    binom = np.empty(terms)  # (1-s)_j / j!  ==  (-1)^j binom(s-1, j)
    binom[0] = 1.0
    for i in range(terms - 1):
        binom[i + 1] = binom[i] * (1.0 - s + i) / (i + 1.0)
    expo = 2.0 * s - n - 2.0 * j  # antiderivative exponent of v**(2s-1-n-2j)
    prof = _profile(n, s)
    h2 = 2.0 ** (2.0 * s - n) * green_tilde_series(0.5, prof)
    return binom, expo, h2


def _far_sum(t: np.ndarray, n: int, s: float) -> np.ndarray:
    binom, expo, h2 = _far_table(n, s)
    L = np.log(t / 2.0)[:, None]
    e = expo[None, :]
    # (t^e - 2^e)/e written through expm1 so e -> 0 gives log(t/2) smoothly
    with np.errstate(invalid="ignore", divide="ignore"):
        pieces = np.where(e == 0.0, L, 2.0**e * np.expm1(e * L) / np.where(e == 0.0, 1.0, e))
    return h2 + pieces @ binom


def h_fast(q, n: int, order, t=None) -> np.ndarray:
    """h(t) for ``t = sqrt(1+q)``, given ``q = t^2 - 1 >= 0`` directly.

    Passing ``q`` instead of ``t`` keeps the boundary regime ``t -> 1``
    cancellation free.  ``t`` may be supplied when it is known more
    accurately than ``sqrt(1+q)`` (large t).
    """
    s = FracOrder.coerce(order).s
    q = np.atleast_1d(np.asarray(q, dtype=float))
    out = np.zeros_like(q)
    if t is None:
        t = np.sqrt(1.0 + q)
    else:
        t = np.broadcast_to(np.asarray(t, dtype=float), q.shape)
    near = (q > 0.0) & (q <= 3.0)
    if np.any(near):
        qn = q[near]
        u = qn / (1.0 + qn)
        coeffs = _profile(n, s).coeffs
        out[near] = (1.0 + qn) ** (s - 0.5 * n) * u**s * np.polynomial.polynomial.polyval(u, coeffs)
    far = q > 3.0
    if np.any(far):
        out[far] = _far_sum(t[far], n, s)
    out[np.isinf(q)] = math.inf
    return out


def green_tilde_fast(r, n: int, order) -> np.ndarray:
    """Vectorised Gt_s on ``[0, inf)``; zero for ``r >= 1``."""
    order = FracOrder.coerce(order)
    s = order.s
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros_like(r)
    inside = (r > 0.0) & (r < 1.0)
    ri = r[inside]
    q = (1.0 - ri) * (1.0 + ri) / (ri * ri)
    out[inside] = ri ** (2.0 * s - n) * h_fast(q, n, order, t=1.0 / ri)
    zero = r == 0.0
    if np.any(zero):
        out[zero] = 1.0 / (2.0 * s - n) if 2.0 * s > n else math.inf
    return out


def boggio_q(x, y) -> np.ndarray:
    """``g(x,y)^2 - 1 = (1-|x|^2)(1-|y|^2)/|x-y|^2`` for rows of ``y``.

    This equals ``(|x|^2|y|^2 - 2x.y + 1)/|x-y|^2 - 1`` and has no removable
    singularity at ``x = 0``.
    """
    x = np.asarray(x, dtype=float)
    y = np.atleast_2d(np.asarray(y, dtype=float))
    d2 = np.sum((y - x) ** 2, axis=-1)
    ax = 1.0 - x @ x
    ay = 1.0 - np.sum(y * y, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.maximum(ax, 0.0) * np.maximum(ay, 0.0) / d2


def boggio_argument(x, y) -> float:
    """g(x,y) = sqrt(1 + (1-|x|^2)(1-|y|^2)/|x-y|^2) = ||x|y - x/|x|| / |x-y|."""
    xc = BallPoint.coerce(x).coords
    yc = BallPoint.coerce(y).coords
    if np.array_equal(xc, yc):
        raise CoincidentPoints("g(x, y) is undefined for x == y")
    num = (xc @ xc) * (yc @ yc) - 2.0 * (xc @ yc) + 1.0
    d2 = float(np.sum((xc - yc) ** 2))
    return math.sqrt(num / d2)


def green_many(x, Y, n: int, order) -> np.ndarray:
    """G_s(x, y) for a fixed pole ``x`` and rows ``y`` of ``Y`` (vectorised)."""
    order = FracOrder.coerce(order)
    s = order.s
    x = np.asarray(getattr(x, "coords", x), dtype=float).reshape(n)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    d2 = np.sum((Y - x) ** 2, axis=-1)
    q = boggio_q(x, Y)
    with np.errstate(divide="ignore"):
        h = h_fast(q, n, order)
        val = boggio_constant(order, n) * d2 ** (s - 0.5 * n) * h
    val[q == 0.0] = 0.0
    return val


def green(x, y, n: int, order, spec: Optional[QuadratureSpec] = None, *, method: str = "series") -> float:
    """Boggio's Green function G_s(x, y) on the closed unit ball.

    ``method="series"`` uses the geometric expansions of :func:`h_fast`;
    ``method="integral"`` integrates ``(v^2-1)^(s-1) v^(1-n)`` from 1 to
    g(x, y) by adaptive quadrature.
    """
    order = FracOrder.coerce(order)
    xp = BallPoint.coerce(x, n).require_closed_ball()
    yp = BallPoint.coerce(y, n).require_closed_ball()
    if np.array_equal(xp.coords, yp.coords):
        raise CoincidentPoints("G_s(x, y) is singular on the diagonal")
    s = order.s
    d2 = float(np.sum((xp.coords - yp.coords) ** 2))
    q = float(boggio_q(xp.coords, yp.coords[None, :])[0])
    if q == 0.0:
        return 0.0
    if method == "series":
        h = float(h_fast(np.array([q]), n, order)[0])
    elif method == "integral":
        spec = spec or KERNEL_SPEC
        upper = q / (math.sqrt(1.0 + q) + 1.0)  # g - 1

        def integrand(d):
            return (d * (2.0 + d)) ** (s - 1.0) * (1.0 + d) ** (1.0 - n)

        sp = spec.with_(singularity_exponent=(s - 1.0) if s < 1.0 else None)
        h = integrate_1d(integrand, 0.0, upper, sp).check().value
    else:
        raise DomainError(f"unknown method {method!r}")
    return boggio_constant(order, n) * d2 ** (s - 0.5 * n) * h


def _smooth_step(t: float) -> float:
    """C-infinity step: 0 on t <= 1/2, 1 on t >= 1."""
    if t <= 0.5:
        return 0.0
    if t >= 1.0:
        return 1.0
    a = math.exp(-1.0 / (t - 0.5))
    b = math.exp(-1.0 / (1.0 - t))
    return a / (a + b)


def h_profile(t: float, n: int, order, spec: QuadratureSpec = KERNEL_SPEC):
    """Return ``(h(t), (t^2-1)_+^s, ht(t))`` with ``h = (t^2-1)_+^s * ht``.

    ``ht`` comes from ``(1/2) int_0^1 tau^(s-1) (1 + (t^2-1) tau)^(-n/2) dtau``,
    multiplied by a smooth cutoff that vanishes on ``[0, 1/2]``; the cutoff
    only acts where the power factor is already zero.
    """
    order = FracOrder.coerce(order)
    s = order.s
    t = float(t)
    if t < 0.0:
        raise DomainError("h is defined for t >= 0")
    chi = _smooth_step(t)
    if chi == 0.0:
        return 0.0, 0.0, 0.0
    z = (t - 1.0) * (t + 1.0)

    def integrand(tau):
        return tau ** (s - 1.0) * (1.0 + z * tau) ** (-0.5 * n)

    sp = spec.with_(singularity_exponent=(s - 1.0) if s < 1.0 else None)
    ht = 0.5 * chi * integrate_1d(integrand, 0.0, 1.0, sp).check().value
    power = z**s if z > 0.0 else 0.0
    return power * ht, power, ht


def ivp_residual(
    r: float, n: int, order, spec: QuadratureSpec = KERNEL_SPEC, *, r_star: float = DEFAULT_R_STAR
) -> float:
    """|Gt' - (2s-n)/r Gt + (1/r)(1-r^2)^(s-1)| at ``r`` in (0, 1).

    For ``r >= r_star`` both Gt and Gt' come from the series (termwise
    derivative); below it Gt' is a Richardson-extrapolated central difference
    of the quadrature representation.
    """
    order = FracOrder.coerce(order)
    s = order.s
    r = float(r)
    if not (0.0 < r < 1.0):
        raise DomainError("ivp_residual needs 0 < r < 1")
    if r >= r_star:
        prof = _profile(n, s, r_star)
        u = (1.0 - r) * (1.0 + r)
        c = prof.coeffs
        k = np.arange(c.shape[0])
        val = u**s * np.polynomial.polynomial.polyval(u, c)
        deriv = -2.0 * r * u ** (s - 1.0) * np.polynomial.polynomial.polyval(u, c * (k + s))
    else:
        val = green_tilde_integral(r, n, order, spec)
        h = 1e-3 * r

        def cd(step):
            return (
                green_tilde_integral(r + step, n, order, spec)
                - green_tilde_integral(r - step, n, order, spec)
            ) / (2.0 * step)

        deriv = (4.0 * cd(h / 2.0) - cd(h)) / 3.0
    rhs = -((1.0 - r) * (1.0 + r)) ** (s - 1.0) / r
    return abs(deriv - (2.0 * s - n) / r * val - rhs)
