"""Fractional and integer Laplacians of radial profiles on the unit ball.

Closed forms cover the powers ``(1-r^2)_+^(sigma+K)``.  The auxiliary series
G# (a weighted sum of terminating 2F1 polynomials) is summed by a stable
three-term recurrence and accelerated by Richardson extrapolation, because its
terms decay only like ``k^(-s-1)``.  A pointwise principal-value evaluator
provides an independent numerical route for any bounded profile.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, FitFailure, SlowConvergence
from .kernel import green_tilde_fast
from .quadrature import (
    DEFAULT_SPEC,
    IntegralResult,
    QuadratureSpec,
    _adaptive,
    tanh_sinh,
)
from .specfun import FracOrder, fraclap_constant, gamma_ratio, log_gamma

__all__ = [
    "RadialPolynomial",
    "radial_poly_laplacian",
    "dyda_coefficient",
    "dyda_polynomial",
    "dyda_power_fraclap",
    "fraclap_s_on_power",
    "GSharpValue",
    "gsharp",
    "gsharp_terms",
    "gsharp_prefactor",
    "fraclap_sigma_of_green",
    "GSharpDecomposition",
    "gsharp_multiplier",
    "gsharp_decompose",
    "gsharp_coefficients_series",
    "star2_lhs",
    "star2_rhs",
    "RadialFunction",
    "power_profile",
    "green_profile_function",
    "fraclap_pointwise",
]


# ----------------------------------------------------------------------------
# even radial polynomials


@dataclass(frozen=True)
class RadialPolynomial:
    """``sum_j coeffs[j] * r**(2j)`` on R^n."""

    coeffs: tuple
    n: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs) or (0.0,))
        if self.n < 1:
            raise DomainError("dimension must be >= 1")

    def __call__(self, r):
        z = np.asarray(r, dtype=float) ** 2
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc if acc.ndim else float(acc)

    @property
    def degree(self) -> int:
        """Highest j with a non-zero coefficient (degree in r^2); 0 for constants."""
        for j in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[j] != 0.0:
                return j
        return 0

    def laplacian(self) -> "RadialPolynomial":
        n = self.n
        out = [self.coeffs[j] * (2 * j) * (2 * j + n - 2) for j in range(1, len(self.coeffs))]
        return RadialPolynomial(tuple(out) or (0.0,), n)

    def scaled(self, factor: float) -> "RadialPolynomial":
        return RadialPolynomial(tuple(factor * c for c in self.coeffs), self.n)

    @classmethod
    def one_minus_r2_power(cls, k: int, n: int) -> "RadialPolynomial":
        """Binomial expansion of ``(1-r^2)**k``."""
        return cls(tuple((-1) ** j * math.comb(k, j) for j in range(k + 1)), n)


def radial_poly_laplacian(p: RadialPolynomial, m: int) -> RadialPolynomial:
    """Exact ``(-Delta)^m p`` via ``Delta r^(2j) = 2j(2j+n-2) r^(2j-2)``."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    for _ in range(m):
        p = p.laplacian().scaled(-1.0)
    return p


# ----------------------------------------------------------------------------
# closed forms for (1 - r^2)_+^(sigma + K)


def dyda_coefficient(K: int, sigma: float, n: int) -> float:
    """4^sigma Gamma(n/2+sigma) Gamma(K+sigma+1) / (Gamma(n/2) K!)."""
    return 4.0 ** sigma * gamma_ratio((0.5 * n + sigma, K + sigma + 1.0), (0.5 * n, K + 1.0))


def dyda_polynomial(K: int, sigma: float, n: int) -> RadialPolynomial:
    """``(-Delta)^sigma (1-|y|^2)_+^(sigma+K)`` inside B, as a polynomial in r^2."""
    if K < 0 or int(K) != K:
        raise DomainError("K must be a non-negative integer")
    if not (0.0 < sigma < 1.0):
        raise DomainError(f"sigma must lie in (0, 1), got {sigma}")
    K = int(K)
    a, c = 0.5 * n + sigma, 0.5 * n
    lead = dyda_coefficient(K, sigma, n)
    coeffs = [lead]
    term = lead
    for j in range(K):
        term *= (a + j) * (j - K) / ((c + j) * (j + 1.0))
        coeffs.append(term)
    return RadialPolynomial(tuple(coeffs), n)


def dyda_power_fraclap(K: int, sigma: float, n: int, r):
    """Value of ``(-Delta)^sigma (1-|y|^2)_+^(sigma+K)`` at radius ``r`` in [0, 1)."""
    ra = np.asarray(r, dtype=float)
    if np.any(ra < 0.0) or np.any(ra >= 1.0):
        raise DomainError("the closed form holds only for 0 <= r < 1")
    return dyda_polynomial(K, sigma, n)(ra)


def fraclap_s_on_power(K: int, order, n: int) -> RadialPolynomial:
    """``(-Delta)^s (1-|y|^2)_+^(s+K)`` inside B as an even polynomial of degree K.

    The fractional factor acts first (closed form for the power ``sigma+K+m``),
    then the integer factor ``(-Delta)^m`` is applied exactly.  For integer s
    the function is a polynomial and only the integer Laplacian is used.
    """
    order = FracOrder.coerce(order)
    m, sigma = order.m, order.sigma
    if K < 0 or int(K) != K:
        raise DomainError("K must be a non-negative integer")
    K = int(K)
    if order.integer_flag:
        return radial_poly_laplacian(RadialPolynomial.one_minus_r2_power(m + K, n), m)
    base = dyda_polynomial(K + m, sigma, n)
    return base if m == 0 else radial_poly_laplacian(base, m)


# ----------------------------------------------------------------------------
# G#: sum_k (n/2)_k/(m+1)_k 2F1(n/2+sigma, -k-m; n/2; r^2)


def _require_fractional_m(order: FracOrder):
    if order.m < 1:
        raise DomainError("this path needs s > 1 (m >= 1)")
    if order.integer_flag:
        raise DomainError("this path needs a non-integer s")


def gsharp_terms(r, n: int, order, count: int) -> np.ndarray:
    """First ``count`` terms of the G# series at each radius (rows = k)."""
    order = FracOrder.coerce(order)
    _require_fractional_m(order)
    z = np.atleast_1d(np.asarray(r, dtype=float)) ** 2
    a, c, m = 0.5 * n + order.sigma, 0.5 * n, order.m
    out = np.empty((count, z.size))
    f_prev, f_cur = np.ones_like(z), 1.0 - a * z / c  # F_0, F_1
    w = 1.0
    N = 1
    while N < m:
        f_prev, f_cur = f_cur, ((2 * N + c - (a + N) * z) * f_cur + N * (z - 1.0) * f_prev) / (c + N)
        N += 1
    for k in range(count):
        out[k] = w * f_cur
        w *= (c + k) / (m + 1.0 + k)
        f_prev, f_cur = f_cur, ((2 * N + c - (a + N) * z) * f_cur + N * (z - 1.0) * f_prev) / (c + N)
        N += 1
    return out


@dataclass(frozen=True)
class GSharpValue:
    value: np.ndarray
    error_estimate: np.ndarray
    terms_used: int


def _richardson(partials: np.ndarray, exponents: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Extrapolate rows of partial sums at K0*2^j assuming tail ~ sum_i c_i K^(-p_i)."""
    table = [partials[0]]
    best = partials[0]
    err = np.full_like(best, np.inf)
    for j in range(1, partials.shape[0]):
        row = [partials[j]]
        for i in range(1, j + 1):
            f = 2.0 ** exponents[i - 1]
            row.append(row[i - 1] + (row[i - 1] - table[i - 1]) / (f - 1.0))
        err = np.maximum(np.abs(row[-1] - row[-2]), np.abs(row[-1] - table[-1]))
        best = row[-1]
        table = row
    return best, err


def gsharp(r, n: int, order, k_trunc: int = 1 << 20, *, rel_tol: float = 1e-9,
           levels: int = 5, full: bool = False):
    """The G# series at radii ``r`` in (0, 1).

    Partial sums are taken at ``K0 * 2^j`` (j < levels) with ``K0`` large
    enough that the geometric component ``(1-r^2)^K`` of the terms has died
    out; the algebraic tail is removed by Richardson extrapolation with
    exponents ``s, s+1, ...``.  The error estimate is the spread of the last
    two extrapolants.  Raises :class:`SlowConvergence` when more than
    ``k_trunc`` terms would be needed or the estimate misses ``rel_tol``.
    """
    order = FracOrder.coerce(order)
    _require_fractional_m(order)
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0.0) or np.any(r_arr >= 1.0):
        raise DomainError("gsharp needs 0 < r < 1")
    z_min = float(np.min(r_arr)) ** 2
    k0 = max(256, int(math.ceil(40.0 / z_min)))
    total = k0 << (levels - 1)
    if total > k_trunc:
        raise SlowConvergence(
            f"G# at r={math.sqrt(z_min):.3g} needs {total} terms, budget is {k_trunc}"
        )
    checkpoints = {k0 << j for j in range(levels)}
    z = r_arr ** 2
    a, c, m = 0.5 * n + order.sigma, 0.5 * n, order.m
    f_prev, f_cur = np.ones_like(z), 1.0 - a * z / c
    N = 1
    while N < m:
        f_prev, f_cur = f_cur, ((2 * N + c - (a + N) * z) * f_cur + N * (z - 1.0) * f_prev) / (c + N)
        N += 1
    # compensated summation keeps the long sum at full precision
    acc = np.zeros_like(z)
    comp = np.zeros_like(z)
    y = np.empty_like(z)
    t = np.empty_like(z)
    nxt = np.empty_like(z)
    zm1 = z - 1.0
    partials = []
    w = 1.0
    for k in range(total):
        np.multiply(f_cur, w, out=y)
        y -= comp
        np.add(acc, y, out=t)
        np.subtract(t, acc, out=comp)
        comp -= y
        acc, t = t, acc
        if k + 1 in checkpoints:
            partials.append(acc.copy())
        w *= (c + k) / (m + 1.0 + k)
        # F_{N+1} = ((2N + c - (a+N) z) F_N + N (z-1) F_{N-1}) / (c+N)
        np.multiply(z, -(a + N), out=nxt)
        nxt += 2 * N + c
        nxt *= f_cur
        f_prev *= N / (c + N)
        f_prev *= zm1
        nxt *= 1.0 / (c + N)
        nxt += f_prev
        f_prev, f_cur, nxt = f_cur, nxt, f_prev
        N += 1
    s = order.s
    value, err = _richardson(np.array(partials), [s + i for i in range(levels)])
    if np.any(err > rel_tol * np.maximum(1.0, np.abs(value))):
        raise SlowConvergence(f"G# tail estimate {float(np.max(err)):.3e} misses rel_tol={rel_tol}")
    if full:
        return GSharpValue(value, err, total)
    return value if np.ndim(r) else float(value[0])


def gsharp_prefactor(n: int, order) -> float:
    """4^(sigma-1/2) Gamma(n/2+sigma) Gamma(s) / (Gamma(n/2) m!)."""
    order = FracOrder.coerce(order)
    return 4.0 ** (order.sigma - 0.5) * gamma_ratio(
        (0.5 * n + order.sigma, order.s), (0.5 * n, order.m + 1.0)
    )


def fraclap_sigma_of_green(r, n: int, order, k_trunc: int = 1 << 20):
    """``(-Delta)^sigma`` of the zero-extended radial Green profile at ``r``."""
    return gsharp_prefactor(n, order) * gsharp(r, n, order, k_trunc)


# ----------------------------------------------------------------------------
# decomposition G# = sum_{k<m} a_k (1-r^2)^k + multiplier * Gt_m


def gsharp_multiplier(n: int, order) -> float:
    """2m Gamma(m+sigma) Gamma(n/2) / (Gamma(n/2+sigma) Gamma(m))."""
    order = FracOrder.coerce(order)
    _require_fractional_m(order)
    m, sigma = order.m, order.sigma
    return 2.0 * m * gamma_ratio((m + sigma, 0.5 * n), (0.5 * n + sigma, float(m)))


@dataclass(frozen=True)
class GSharpDecomposition:
    a: tuple
    multiplier: float
    m: int
    sigma: float
    n: int
    residual: float

    def polynomial_part(self, r):
        w = 1.0 - np.asarray(r, dtype=float) ** 2
        return sum(ak * w ** k for k, ak in enumerate(self.a))

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.polynomial_part(r) + self.multiplier * green_tilde_fast(r, self.n, self.m).reshape(r.shape)


def gsharp_decompose(n: int, order, *, r_range=(0.05, 0.95), check_points: int = 50,
                     tol: float = 1e-8) -> GSharpDecomposition:
    """Fit the polynomial coefficients a_0..a_{m-1} and certify the reconstruction.

    ``D(r) = G#(r) - multiplier * Gt_m(r)`` is sampled at m Chebyshev radii and
    solved in the basis ``(1-r^2)^k``; the residual is then measured on an
    evenly spaced grid that avoids the fit nodes.
    """
    order = FracOrder.coerce(order)
    _require_fractional_m(order)
    m = order.m
    mult = gsharp_multiplier(n, order)
    lo, hi = r_range
    j = np.arange(m)
    cheb = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * j + 1) * math.pi / (2 * m))
    grid = np.linspace(lo, hi, check_points)
    # nudge grid points that coincide with fit nodes
    for i, g in enumerate(grid):
        if np.min(np.abs(cheb - g)) < 1e-9:
            grid[i] = g + 1e-3 * (hi - lo) / check_points
    radii = np.concatenate([cheb, grid])
    gs = gsharp(radii, n, order)
    gm = green_tilde_fast(radii, n, m)
    d = gs - mult * gm
    basis = (1.0 - cheb[:, None] ** 2) ** j[None, :]
    a = np.linalg.solve(basis, d[:m])
    recon = ((1.0 - grid[:, None] ** 2) ** j[None, :]) @ a
    residual = float(np.max(np.abs(d[m:] - recon)))
    if not residual <= tol:
        raise FitFailure(f"G# reconstruction residual {residual:.3e} exceeds {tol:.1e}")
    return GSharpDecomposition(tuple(float(v) for v in a), mult, m, order.sigma, n, residual)


def gsharp_coefficients_series(n: int, order, *, k0: int = 128, levels: int = 6) -> np.ndarray:
    """Independent route to a_0..a_{m-1} through the rearranged double series.

    ``a_l = (n/2+sigma)_l / l! * sum_{k>=m} T_k (k+1-l)_l / (k-sigma-l)_l`` with
    ``T_k = (-sigma)_k / ((m+1)_{k-m} (n/2+k-m)_m)``; the inner sums decay like
    ``k^(-s-1)`` and are extrapolated the same way as G#.
    """
    order = FracOrder.coerce(order)
    _require_fractional_m(order)
    m, sigma, h = order.m, order.sigma, 0.5 * n
    total = k0 << (levels - 1)
    checkpoints = {k0 << j for j in range(levels)}
    # T_m = (-sigma)_m / (h)_m; then the ratio recurrence in k
    t = gamma_ratio((m - sigma, h), (-sigma, h + m))
    acc = [0.0] * m
    sums = [[] for _ in range(m)]
    comp = [0.0] * m
    for idx in range(total):
        k = m + idx
        for ell in range(m):
            rho = 1.0
            for i in range(ell):
                rho *= (k + 1 - ell + i) / (k - sigma - ell + i)
            y = t * rho - comp[ell]
            s_new = acc[ell] + y
            comp[ell] = (s_new - acc[ell]) - y
            acc[ell] = s_new
        if idx + 1 in checkpoints:
            for ell in range(m):
                sums[ell].append(acc[ell])
        # T_{k+1}/T_k = (k - sigma) / (k + 1) * (h + k - m) / (h + k)
        t *= (k - sigma) / (k + 1.0) * (h + k - m) / (h + k)
    out = np.empty(m)
    for ell in range(m):
        val, _ = _richardson(np.array(sums[ell])[:, None], [order.s + i for i in range(levels)])
        lead = math.exp(log_gamma(h + sigma + ell)[0] - log_gamma(h + sigma)[0] - math.lgamma(ell + 1))
        out[ell] = lead * float(val[0])
    return out


def star2_lhs(n: int, k: int, ell: int, m: int):
    """(n/2+k-m)_l / (n/2+k)_l; exact when ``n`` is a Fraction-compatible value."""
    from fractions import Fraction

    h = Fraction(n, 2)
    num = den = Fraction(1)
    for i in range(ell):
        num *= h + k - m + i
        den *= h + k + i
    return num / den


def star2_rhs(n: int, k: int, ell: int, m: int):
    """(n/2+k-m)_m / (n/2+k+l-m)_m in exact rational arithmetic."""
    from fractions import Fraction

    h = Fraction(n, 2)
    num = den = Fraction(1)
    for i in range(m):
        num *= h + k - m + i
        den *= h + k + ell - m + i
    return num / den


# ----------------------------------------------------------------------------
# pointwise principal-value evaluator


@dataclass(frozen=True)
class RadialFunction:
    """A radial function ``u(y) = f(|y|)`` with first and second derivatives.

    ``f``, ``d1_over_r`` (= f'(r)/r) and ``d2`` act on arrays of radii.
    ``kinks`` lists radii where ``f`` is not smooth; ``support`` bounds the
    support.
    """

    f: Callable
    d1_over_r: Optional[Callable] = None
    d2: Optional[Callable] = None
    support: float = 1.0
    kinks: tuple = (1.0,)

    def __call__(self, Y):
        Y = np.atleast_2d(Y)
        return self.f(np.sqrt(np.einsum("ij,ij->i", Y, Y)))

    def hessian(self, x):
        if self.d1_over_r is None or self.d2 is None:
            return None
        x = np.asarray(x, dtype=float)
        r = math.sqrt(float(x @ x))
        d1r = float(self.d1_over_r(np.array([r]))[0])
        d2 = float(self.d2(np.array([r]))[0])
        if r == 0.0:
            return d2 * np.eye(x.size)
        xh = x / r
        P = np.outer(xh, xh)
        return d2 * P + d1r * (np.eye(x.size) - P)


def power_profile(p: float) -> RadialFunction:
    """``(1-|y|^2)_+^p`` with analytic derivatives (zero outside the ball)."""

    def f(r):
        w = 1.0 - r * r
        return np.where(w > 0.0, np.maximum(w, 0.0) ** p, 0.0)

    def d1r(r):
        w = np.maximum(1.0 - r * r, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(w > 0.0, -2.0 * p * w ** (p - 1.0), 0.0)

    def d2(r):
        w = np.maximum(1.0 - r * r, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = -2.0 * p * w ** (p - 1.0) + 4.0 * p * (p - 1.0) * r * r * w ** (p - 2.0)
        return np.where(w > 0.0, v, 0.0)

    return RadialFunction(f, d1r, d2, 1.0, (1.0,))


def green_profile_function(n: int, order) -> RadialFunction:
    """The zero-extended radial Green profile ``Gt_s(|y|)`` as a PV-ready function.

    Derivatives follow from the first-order equation
    ``Gt' = ((2s-n) Gt - (1-r^2)^(s-1)) / r``.
    """
    order = FracOrder.coerce(order)
    s = order.s
    e = 2.0 * s - n

    def f(r):
        return green_tilde_fast(r, n, order).reshape(np.shape(r))

    def d1r(r):
        g = f(r)
        w = np.maximum(1.0 - r * r, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = (e * g - w ** (s - 1.0)) / (r * r)
        return np.where(w > 0.0, v, 0.0)

    def d2(r):
        g = f(r)
        w = np.maximum(1.0 - r * r, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            g1 = (e * g - w ** (s - 1.0)) / r
            v = (-e * g + w ** (s - 1.0)) / (r * r) + e * g1 / r + 2.0 * (s - 1.0) * w ** (s - 2.0)
        return np.where(w > 0.0, v, 0.0)

    return RadialFunction(f, d1r, d2, 1.0, (0.0, 1.0))


def _fd_hessian(u, x: np.ndarray, h: float) -> np.ndarray:
    n = x.size
    e = np.eye(n) * h
    pts = [x]
    for i in range(n):
        pts += [x + 2 * e[i], x - 2 * e[i]]
        for j in range(i + 1, n):
            pts += [x + e[i] + e[j], x + e[i] - e[j], x - e[i] + e[j], x - e[i] - e[j]]
    vals = np.asarray(u(np.array(pts)), dtype=float)
    u0 = vals[0]
    H = np.empty((n, n))
    idx = 1
    for i in range(n):
        H[i, i] = (vals[idx] - 2 * u0 + vals[idx + 1]) / (4 * h * h)
        idx += 2
        for j in range(i + 1, n):
            H[i, j] = H[j, i] = (vals[idx] - vals[idx + 1] - vals[idx + 2] + vals[idx + 3]) / (4 * h * h)
            idx += 4
    return H


def _sphere_crossings(c: np.ndarray, omega: np.ndarray, radius: float) -> list:
    """Positive t with |c + t omega| = radius."""
    cw = float(omega @ c)
    disc = cw * cw - (float(c @ c) - radius * radius)
    if disc <= 0.0:
        return []
    root = math.sqrt(disc)
    return [t for t in (-cw - root, -cw + root) if t > 0.0]


def _tangent_angles(x: np.ndarray, radii) -> list:
    """Angles from the axis x/|x| at which rays from x touch a sphere tangentially."""
    rx = math.sqrt(float(x @ x))
    out = []
    for R in radii:
        if 0.0 < R < rx:
            a = math.asin(R / rx)
            out += [a, math.pi - a]
    return out


def fraclap_pointwise(
    u,
    x,
    sigma: float,
    n: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    hessian=None,
    support_radius: Optional[float] = None,
    kinks: Optional[Sequence[float]] = None,
    fd_step: float = 1e-4,
) -> float:
    """``(-Delta)^sigma u(x)`` from the singular-integral definition.

    ``u`` maps an ``(m, n)`` array of points to ``m`` values and vanishes
    outside the ball of radius ``support_radius`` about the origin.  ``kinks``
    are radii of origin-centred spheres where ``u`` is not smooth; rays are
    split where they cross them and where they pass closest to the origin.

    The inner ball of radius ``spec.pv_inner_radius`` (default: small and
    kept well away from every kink) uses the second-order Taylor term, the
    annulus up to the far edge of the support is integrated numerically, and
    the remaining tail is added in closed form.  ``hessian`` may be an ``n x n``
    array or a callable; otherwise it is approximated by central differences.
    """
    if not (0.0 < sigma < 1.0):
        raise DomainError(f"sigma must lie in (0, 1), got {sigma}")
    x = np.asarray(getattr(x, "coords", x), dtype=float).reshape(n)
    if isinstance(u, RadialFunction):
        if support_radius is None:
            support_radius = u.support
        if kinks is None:
            kinks = u.kinks
    support = 1.0 if support_radius is None else float(support_radius)
    kinks = tuple(kinks) if kinks is not None else (support,)
    rx = math.sqrt(float(x @ x))
    dist = min((abs(rx - R) for R in kinks), default=math.inf)
    if dist == 0.0:
        raise DomainError("x lies on a sphere where u is not smooth")
    rho_in = spec.pv_inner_radius
    if rho_in is None:
        rho_in = min(1e-3, 0.25 * dist)
    elif rho_in >= dist:
        raise DomainError("pv_inner_radius reaches a non-smooth sphere of u")

    if hessian is None and isinstance(u, RadialFunction):
        hessian = u.hessian(x)
    if callable(hessian):
        H = np.asarray(hessian(x), dtype=float)
    elif hessian is not None:
        H = np.asarray(hessian, dtype=float)
    else:
        H = _fd_hessian(u, x, min(fd_step, 0.1 * dist))
    u0 = float(np.asarray(u(x[None, :]), dtype=float)[0])
    ts_tol = max(1e-2 * spec.rel_tol, 1e-13)
    # absolute floor for the pieces: rounding in 2u(x) - u(x+) - u(x-) sets it
    probe = np.linspace(-support, support, 41)
    pts = np.zeros((probe.size * n + 1, n))
    for i in range(n):
        pts[i * probe.size:(i + 1) * probe.size, i] = probe
    pts[-1] = x
    scale = max(float(np.max(np.abs(np.asarray(u(pts), dtype=float)))), abs(u0),
                float(np.max(np.abs(H))) * rho_in ** 2, 1e-300)
    piece_abs = ts_tol * scale
    fails = [0]

    def ray_integral(omega: np.ndarray) -> float:
        breaks = set()
        for R in set(kinks) | {support}:
            if R <= 0.0:
                continue
            for sgn in (1.0, -1.0):
                breaks.update(_sphere_crossings(x, sgn * omega, R))
        t0 = abs(float(omega @ x))
        if t0 > 0.0 and any(R == 0.0 for R in kinks):
            breaks.add(t0)
        far = max(_sphere_crossings(x, omega, support) + _sphere_crossings(x, -omega, support)
                  + [rho_in])
        edges = [rho_in]
        g = rho_in * 8.0
        first = min([b for b in breaks if b > rho_in] + [far])
        while g < first:
            edges.append(g)
            g *= 8.0
        edges += sorted(b for b in breaks if rho_in < b < far)
        edges.append(far)

        def integrand(rho):
            pp = x[None, :] + rho[:, None] * omega[None, :]
            pm = x[None, :] - rho[:, None] * omega[None, :]
            d = 2.0 * u0 - np.asarray(u(pp), dtype=float) - np.asarray(u(pm), dtype=float)
            return d * rho ** (-1.0 - 2.0 * sigma)

        parts = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            res = tanh_sinh(integrand, lo, hi, rel_tol=ts_tol, abs_tol=piece_abs)
            if not res.converged:
                res = _adaptive(integrand, [lo, hi], ts_tol, piece_abs, spec.max_subdivisions)
                if not res.converged:
                    fails[0] += 1
            parts.append(res.value)
        inner = -float(omega @ H @ omega) * rho_in ** (2.0 - 2.0 * sigma) / (2.0 - 2.0 * sigma)
        tail = 2.0 * u0 * far ** (-2.0 * sigma) / (2.0 * sigma)
        return math.fsum(parts) + inner + tail

    # each direction pairs with its antipode, so a hemisphere suffices
    ang_tol = max(spec.rel_tol, 1e-11)
    if n == 1:
        total = ray_integral(np.array([1.0]))
    else:
        axis = x / rx if rx > 0.0 else np.eye(n)[0]
        # orthonormal frame with the axis first
        q, _ = np.linalg.qr(np.column_stack([axis, np.eye(n)]))
        frame = q[:, :n] * np.sign(q[:, 0] @ axis)
        radii_all = tuple(set(kinks) | {support})
        tang = _tangent_angles(x, radii_all)
        if n == 2:
            def f_phi(phi):
                return np.array([
                    ray_integral(frame @ np.array([math.cos(p), math.sin(p)])) for p in phi
                ])

            edges = sorted({0.0, math.pi, 0.5 * math.pi, *[t for t in tang if 0 < t < math.pi]})
            res = _adaptive(f_phi, edges, ang_tol, ang_tol * scale, spec.max_subdivisions)
        elif n == 3:
            def f_theta(theta):
                out = np.empty_like(theta)
                for i, th in enumerate(theta):
                    st, ct = math.sin(th), math.cos(th)
                    out[i] = st * _periodic(lambda p: ray_integral(
                        frame @ np.array([ct, st * math.cos(p), st * math.sin(p)])), ang_tol)
                return out

            # integrate the polar angle over [0, pi/2]; rays cover the antipodes
            edges = sorted({0.0, 0.5 * math.pi, *[t for t in tang if 0 < t < 0.5 * math.pi],
                            *[math.pi - t for t in tang if 0.5 * math.pi < t < math.pi]})
            res = _adaptive(f_theta, edges, ang_tol, ang_tol * scale, spec.max_subdivisions)
        else:
            raise DomainError("fraclap_pointwise supports n = 1, 2, 3")
        if not res.converged:
            fails[0] += 1
        total = res.value
    if fails[0]:
        from .errors import NonConvergence

        raise NonConvergence(f"{fails[0]} sub-integrals did not converge", IntegralResult(
            fraclap_constant(n, sigma) * total, math.nan, 0, False))
    return fraclap_constant(n, sigma) * total


def _periodic(f: Callable[[float], float], tol: float, start: int = 8, max_pts: int = 512) -> float:
    """Trapezoid rule for a smooth 2*pi-periodic function, doubling until stable."""
    k = start
    vals = [f(2.0 * math.pi * i / k) for i in range(k)]
    est = 2.0 * math.pi * math.fsum(vals) / k
    while k < max_pts:
        new = [f(2.0 * math.pi * (i + 0.5) / k) for i in range(k)]
        vals += new
        k *= 2
        nxt = 2.0 * math.pi * math.fsum(vals) / k
        if abs(nxt - est) <= tol * max(abs(nxt), 1e-300):
            return nxt
        est = nxt
    return est
