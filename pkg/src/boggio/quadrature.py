"""Deterministic adaptive quadrature on intervals and on the unit ball.

The 1-D integrator is a globally adaptive Gauss-Kronrod 7/15 scheme (the
QUADPACK QAG strategy).  Integrands are called with numpy arrays of nodes and
must return arrays of the same shape.

Ball integrals use polar coordinates about a centre point, which is either
the origin or a caller-supplied singular point.  The radial integral then
carries the power ``rho**(n-1+alpha)`` of a kernel ``|x-y|**alpha`` and is
regularised by the endpoint substitution of :func:`integrate_1d`.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, NonConvergence

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "integrate_1d",
    "integrate_ball",
    "ray_exit_distance",
    "ray_ball_interval",
]

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes, ascending
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and singularity parameters for a quadrature call.

    ``singularity_exponent`` is the power beta in ``(t-a)**beta`` at the left
    endpoint; ``pv_inner_radius`` is the radius of the Taylor-corrected ball
    used by principal-value integrals.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    singularity_exponent: Optional[float] = None
    pv_inner_radius: Optional[float] = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.singularity_exponent is not None and not self.singularity_exponent > -1:
            raise DomainError("singularity_exponent must exceed -1")
        if self.pv_inner_radius is not None and not self.pv_inner_radius > 0:
            raise DomainError("pv_inner_radius must be positive")

    def with_(self, **changes) -> "QuadratureSpec":
        return replace(self, **changes)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    subdivisions_used: int
    converged: bool

    def __float__(self) -> float:
        return self.value

    def check(self) -> "IntegralResult":
        """Return self, raising :class:`NonConvergence` if the budget ran out."""
        if not self.converged:
            raise NonConvergence(
                f"quadrature did not converge: value={self.value!r}, "
                f"error estimate={self.error_estimate:.3e}",
                self,
            )
        return self


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fx = np.asarray(f(c + h * _NODES), dtype=float)
    k = h * float(fx @ _KRONROD_W)
    g = h * float(fx @ _GAUSS_W)
    return k, abs(k - g)


def _adaptive(f, edges, rel_tol, abs_tol, limit):
    # max-heap on error over all pieces; ties broken by left endpoint
    heap = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _gk15(f, lo, hi)
        heap.append((-e, lo, hi, v))
    heapq.heapify(heap)
    total_err = math.fsum(-item[0] for item in heap)
    total = math.fsum(item[3] for item in heap)
    n_sub = len(heap)
    while total_err > max(abs_tol, rel_tol * abs(total)) and n_sub < limit:
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):  # interval exhausted in floating point
            heapq.heappush(heap, (neg_err, lo, hi, v))
            break
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        n_sub += 1
    # recombine in interval order so the value does not depend on heap history
    pieces = sorted(heap, key=lambda item: item[1])
    value = math.fsum(item[3] for item in pieces)
    error = math.fsum(-item[0] for item in pieces)
    converged = error <= max(abs_tol, rel_tol * abs(value))
    return IntegralResult(value, error, n_sub, converged)


def integrate_1d(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    breakpoints=(),
) -> IntegralResult:
    """Integrate ``f`` over ``[a, b]``.

    When ``spec.singularity_exponent`` is ``beta``, ``f`` is expected to behave
    like ``(t-a)**beta`` times a smooth function near ``a``; the substitution
    ``t = a + w**(1/(beta+1))`` removes that factor before the adaptive rule
    runs.  Interior ``breakpoints`` start the subdivision there.

    Never raises on budget exhaustion; inspect ``converged`` or call
    :meth:`IntegralResult.check`.
    """
    a = float(a)
    b = float(b)
    if b < a:
        raise DomainError(f"integrate_1d needs a <= b, got [{a}, {b}]")
    if a == b:
        return IntegralResult(0.0, 0.0, 0, True)
    beta = spec.singularity_exponent
    edges = [a] + sorted(p for p in breakpoints if a < p < b) + [b]
    if beta is not None and beta != 0.0:
        p = beta + 1.0
        inv = 1.0 / p

        def g(w, _f=f, _a=a):
            t_off = w ** inv
            return _f(_a + t_off) * w ** (-beta * inv) * inv

        fun = g
        # map breakpoints into the w variable
        edges = [(e - a) ** p for e in edges]
        edges[0] = 0.0
    else:
        fun = f
    return _adaptive(fun, edges, spec.rel_tol, spec.abs_tol, spec.max_subdivisions)


def ray_exit_distance(c: np.ndarray, omega: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Distance from an interior point ``c`` along unit directions to the sphere."""
    cw = omega @ c
    disc = cw * cw + (radius * radius - c @ c)
    return -cw + np.sqrt(np.maximum(disc, 0.0))


def ray_ball_interval(c: np.ndarray, omega: np.ndarray, radius: float):
    """Parameter interval ``[lo, hi]`` with ``|c + t omega| < radius``, t >= 0.

    Returns ``None`` when the ray misses the ball.
    """
    cw = float(omega @ c)
    cc = float(c @ c)
    disc = cw * cw - (cc - radius * radius)
    if disc <= 0.0:
        return None
    root = math.sqrt(disc)
    hi = -cw + root
    if hi <= 0.0:
        return None
    if cc < radius * radius:
        return 0.0, hi
    # c outside: lo = (cc - R^2) / hi avoids cancellation in -cw - root
    return (cc - radius * radius) / hi, hi


def _sphere_rule_fixed(n: int, nodes: int):
    """Product rule on S^{n-1} in hyperspherical angles (n >= 2).

    Each polar angle uses Gauss-Jacobi nodes in ``t = cos(theta)`` with the
    weight ``(1-t^2)^((k-1)/2)`` that absorbs ``sin^k(theta)``; the azimuth uses
    the trapezoid rule.  Exact for spherical harmonics of degree below
    ``2 * nodes``.
    """
    phi = 2.0 * math.pi * np.arange(2 * nodes) / (2 * nodes)
    dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    weights = np.full(2 * nodes, 2.0 * math.pi / (2 * nodes))
    for k in range(1, n - 1):
        t, wt = roots_jacobi(nodes, 0.5 * (k - 1), 0.5 * (k - 1))
        st = np.sqrt(1.0 - t * t)
        dirs = np.concatenate(
            [np.broadcast_to(t[:, None, None], (nodes, dirs.shape[0], 1)),
             st[:, None, None] * dirs[None, :, :]],
            axis=2,
        ).reshape(-1, dirs.shape[1] + 1)
        weights = (wt[:, None] * weights[None, :]).reshape(-1)
    return dirs, weights


def integrate_ball(
    g: Callable[[np.ndarray], np.ndarray],
    n: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    singular_at=None,
    singular_order: Optional[float] = None,
    *,
    support_radius: Optional[float] = None,
    radial_breaks=(),
    sphere_nodes: int = 20,
) -> IntegralResult:
    """Integrate ``g`` over the unit ball of R^n.

    ``g`` receives an ``(m, n)`` array of points and returns ``m`` values.
    With ``singular_at = x`` the polar coordinates are centred at ``x`` and
    ``g(y) ~ |x-y|**singular_order`` is absorbed by the radial substitution.
    ``support_radius`` declares ``g = 0`` for ``|y| >= support_radius``; the
    rays are clipped to that ball.  ``radial_breaks`` lists extra distances
    from the centre where the radial integrand has kinks.

    Dimensions 2 and 3 use adaptive angular quadrature; n >= 4 uses a fixed
    product rule of ``sphere_nodes`` Gauss points per polar angle, so accuracy
    there is limited by the angular smoothness of the integrand.
    """
    if n < 1:
        raise DomainError("dimension must be >= 1")
    centre = np.zeros(n) if singular_at is None else np.asarray(
        getattr(singular_at, "coords", singular_at), dtype=float
    ).reshape(n)
    if centre @ centre >= 1.0:
        raise DomainError("the polar centre must lie inside the unit ball")
    alpha = 0.0 if singular_order is None else float(singular_order)
    if singular_order is not None and not alpha > -n:
        raise DomainError("singular_order must exceed -n for integrability")
    beta = n - 1 + alpha
    rad_spec = spec.with_(singularity_exponent=None if beta == round(beta) and beta >= 0 else beta)
    plain_spec = spec.with_(singularity_exponent=None)
    sup = 1.0 if support_radius is None else min(1.0, float(support_radius))

    n_fail = [0]
    n_sub = [0]

    def radial(omega: np.ndarray) -> float:
        iv = ray_ball_interval(centre, omega, sup)
        if iv is None:
            return 0.0
        lo, hi = iv

        def fr(rho):
            pts = centre[None, :] + rho[:, None] * omega[None, :]
            return rho ** (n - 1) * np.asarray(g(pts), dtype=float)

        if lo == 0.0:
            res = integrate_1d(fr, 0.0, hi, rad_spec, breakpoints=radial_breaks)
        else:
            res = integrate_1d(fr, lo, hi, plain_spec, breakpoints=radial_breaks)
        n_sub[0] += res.subdivisions_used
        if not res.converged:
            n_fail[0] += 1
        return res.value

    if n == 1:
        vals = [radial(np.array([1.0])), radial(np.array([-1.0]))]
        value = math.fsum(vals)
        return IntegralResult(value, 0.0, n_sub[0], n_fail[0] == 0)

    ang_spec = spec.with_(singularity_exponent=None, rel_tol=max(spec.rel_tol, 1e-13))
    if n == 2:
        def f_phi(phi):
            return np.array([radial(np.array([math.cos(p), math.sin(p)])) for p in phi])

        res = integrate_1d(
            f_phi, 0.0, 2.0 * math.pi, ang_spec,
            breakpoints=(0.5 * math.pi, math.pi, 1.5 * math.pi),
        )
    elif n == 3:
        def f_theta(theta):
            out = np.empty_like(theta)
            for i, th in enumerate(theta):
                st, ct = math.sin(th), math.cos(th)

                def f_phi(phi, st=st, ct=ct):
                    return np.array([
                        radial(np.array([st * math.cos(p), st * math.sin(p), ct]))
                        for p in phi
                    ])

                inner = integrate_1d(
                    f_phi, 0.0, 2.0 * math.pi, ang_spec, breakpoints=(math.pi,)
                )
                if not inner.converged:
                    n_fail[0] += 1
                out[i] = st * inner.value
            return out

        res = integrate_1d(f_theta, 0.0, math.pi, ang_spec, breakpoints=(0.5 * math.pi,))
    else:
        dirs, weights = _sphere_rule_fixed(n, sphere_nodes)
        vals = np.array([radial(d) for d in dirs])
        value = math.fsum(weights * vals)
        return IntegralResult(value, 0.0, n_sub[0], n_fail[0] == 0)
    return IntegralResult(
        res.value,
        res.error_estimate,
        res.subdivisions_used + n_sub[0],
        res.converged and n_fail[0] == 0,
    )



def _tanh_sinh_sum(f, a, b, t):
    """Sum of w(t) f(x(t)) over the symmetric node set +-t (t > 0)."""
    arg = 0.5 * math.pi * np.sinh(t)
    e = np.exp(-2.0 * arg)
    w = 2.0 * math.pi * np.cosh(t) * e / (1.0 + e) ** 2
    # offset of the node from the nearer endpoint, as a fraction of (b - a)
    off = e / (1.0 + e)
    keep = w > 1e-300
    w, off = w[keep], off[keep]
    width = b - a
    pts = np.concatenate([a + width * off, b - width * off])
    wts = np.concatenate([w, w])
    # nodes that round onto an endpoint carry negligible weight for
    # integrands that are bounded or mildly singular there
    inside = (pts > a) & (pts < b)
    return float(np.asarray(f(pts[inside]), dtype=float) @ wts[inside])


def tanh_sinh(f, a: float, b: float, rel_tol: float = 1e-11, abs_tol: float = 1e-300,
              max_level: int = 8, tmax: float = 4.0) -> IntegralResult:
    """Double-exponential quadrature on ``[a, b]`` for a vectorized ``f``.

    Tolerates integrable algebraic singularities of unknown exponent at both
    endpoints.  Nodes next to an endpoint are placed by their offset from it,
    so ``f`` sees them at full relative precision.  Each level halves the
    step; the change between consecutive levels is the error estimate.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return IntegralResult(0.0, 0.0, 0, True)
    h = 0.5
    mid = 0.5 * (a + b)
    centre = 0.5 * math.pi * float(f(np.array([mid]))[0])
    acc = centre + _tanh_sinh_sum(f, a, b, np.arange(1, int(tmax / h) + 1) * h)
    prev = 0.5 * (b - a) * h * acc
    err = math.inf
    for level in range(1, max_level + 1):
        h *= 0.5
        odd = np.arange(1, int(tmax / h) + 1, 2) * h
        acc += _tanh_sinh_sum(f, a, b, odd)
        est = 0.5 * (b - a) * h * acc
        err = abs(est - prev)
        prev = est
        if level >= 3 and err <= max(abs_tol, rel_tol * abs(est)):
            return IntegralResult(est, err, level, True)
    return IntegralResult(prev, err, max_level, False)
