"""Delaunay profiles of rotational constant-mean-curvature surfaces.

The profile ``x1 = c(H, t, x3)`` through the apex ``(0, t)`` solves

    dx1/dx3 = -+ D(H, t, x1),   D = sqrt((x1 / q)^2 - 1),   q = H x1^2 + t - H t^2.

Writing ``r2 = 1/H - t`` one has the factorization

    x^2 - q^2 = H |x - t| |x - r2| (x + q),

so ``1/D = q / sqrt(x^2 - q^2)`` has square-root singularities exactly at
``x = t`` and ``x = r2``.  All integrals substitute ``x = e +- u^2`` at such
an endpoint ``e``, which cancels the singular factor and leaves a smooth
integrand for plain adaptive quadrature.

Two branches occur.  When ``r2 < t`` the apex is a bulge and the profile
decreases in ``|x3|`` (the near-sphere case ``H ~ 1, t ~ 1``).  When
``r2 > t`` the apex is a neck and the profile increases towards the bulge
``x1 = r2``; for ``H = 1`` and ``t < 1/2`` this is the undulary ``u_t``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .curve import PlanarCurve, integrate_field
from .errors import (BeyondBulge, DomainError, NoBracket, NoIntersection,
                     OutOfWindow, RadicandNegative)

QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-13, limit=400)
ROOT_XTOL = 1e-14
WINDOW_SLACK = 1e-12


def _q(H, t, x):
    return H * x * x + t - H * t * t


def D(H: float, t: float, x: float) -> float:
    """``sqrt((x / (H x^2 + t - H t^2))^2 - 1)``."""
    q = _q(H, t, x)
    if q == 0.0:
        raise RadicandNegative("denominator H x^2 + t - H t^2 vanishes")
    rad = (x / q) ** 2 - 1.0
    if rad < 0.0:
        if rad > -1e-13:
            return 0.0
        raise RadicandNegative(f"radicand {rad:.3g} < 0 at x = {x}")
    return math.sqrt(rad)


@dataclass(frozen=True)
class DelaunayParams:
    """Profile parameters ``(H, t)`` with the interval swept by ``x1``.

    ``window`` is the closed interval of heights between the apex ``t`` and
    the opposite turning point (or the point where ``q`` vanishes).
    """

    H: float
    t: float
    window: tuple = field(init=False)
    neck: bool = field(init=False)

    def __post_init__(self):
        H, t = self.H, self.t
        if not (H > 0 and t > 0):
            raise DomainError("need H > 0 and t > 0")
        r2 = 1.0 / H - t
        if r2 > t:
            window = (t, r2)
            neck = True
        else:
            qzero = math.sqrt(max(0.0, t * t - t / H))
            window = (max(r2, qzero, 0.0), t)
            neck = False
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "neck", neck)

    @property
    def r2(self) -> float:
        return 1.0 / self.H - self.t

    @property
    def far_end(self) -> float:
        """Height of the end of the branch opposite to the apex."""
        return self.window[1] if self.neck else self.window[0]

    @property
    def far_end_is_turning(self) -> bool:
        return abs(self.far_end - self.r2) <= 1e-15 and self.r2 > 0

    def contains(self, x1: float) -> bool:
        lo, hi = self.window
        return lo - WINDOW_SLACK <= x1 <= hi + WINDOW_SLACK


@dataclass(frozen=True)
class ZoneSpec:
    """Zone parameter ``a`` of the band ``x1^2 + x2^2 > a^2`` on the unit sphere."""

    a: float

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise DomainError("zone parameter must satisfy 0 < a < 1")

    @property
    def w3(self) -> float:
        """``x3`` of the zone boundary on the unit circle."""
        return math.sqrt(1.0 - self.a * self.a)

    @property
    def theta1(self) -> float:
        return math.acos(self.a)


def _quad(fun, lo, hi):
    if hi <= lo:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(fun, lo, hi, **QUAD_OPTS)
    return val


def _segment(H, t, e, other, x_near, x_far, numer):
    """Integral of ``numer(x) / sqrt(x^2 - q^2)`` between two heights.

    ``e`` is a root of ``x^2 - q^2`` on the side of ``x_near``; the
    substitution ``x = e + sign * u^2`` removes its singularity.  ``other``
    is the opposite root.
    """
    sgn = 1.0 if x_far >= e else -1.0
    u0 = math.sqrt(abs(x_near - e))
    u1 = math.sqrt(abs(x_far - e))

    def f(u):
        x = e + sgn * u * u
        q = _q(H, t, x)
        rad = H * abs(x - other) * (x + q)
        return 2.0 * numer(x, q) / math.sqrt(rad)

    return _quad(f, u0, u1)


def _plain(H, t, lo, hi, numer):
    def f(x):
        q = _q(H, t, x)
        rad = x * x - q * q
        return numer(x, q) / math.sqrt(max(rad, 1e-300))

    return _quad(f, lo, hi)


def _branch_integral(par: DelaunayParams, x_from, x_to, numer):
    """Integral over the heights between ``x_from`` and ``x_to`` on the branch."""
    H, t = par.H, par.t
    lo, hi = sorted((x_from, x_to))
    if hi - lo == 0.0:
        return 0.0
    far = par.far_end
    r2 = par.r2
    far_root = par.far_end_is_turning
    mid = 0.5 * (t + far)
    total = 0.0
    if par.neck:
        seg = (lo, min(hi, mid))
        if seg[1] > seg[0]:
            total += _segment(H, t, t, r2, seg[0], seg[1], numer)
        seg = (max(lo, mid), hi)
        if seg[1] > seg[0]:
            total += _segment(H, t, r2, t, seg[1], seg[0], numer)
    else:
        seg = (max(lo, mid), hi)
        if seg[1] > seg[0]:
            total += _segment(H, t, t, r2, seg[1], seg[0], numer)
        seg = (lo, min(hi, mid))
        if seg[1] > seg[0]:
            if far_root:
                total += _segment(H, t, r2, t, seg[0], seg[1], numer)
            else:
                total += _plain(H, t, seg[0], seg[1], numer)
    return total


def _x3_numer(x, q):
    return q


def _arc_numer(x, q):
    return x


def _check_height(par: DelaunayParams, x1):
    if not par.contains(x1):
        raise OutOfWindow(
            f"x1 = {x1} outside profile window {par.window} of (H, t) = ({par.H}, {par.t})")
    lo, hi = par.window
    return min(max(x1, lo), hi)


def profile_x3(H: float, t: float, x1: float) -> float:
    """``x3 >= 0`` at which the profile through ``(0, t)`` reaches height ``x1``."""
    par = DelaunayParams(H, t)
    x1 = _check_height(par, x1)
    return _branch_integral(par, x1, t, _x3_numer)


def profile_arclength(H: float, t: float, x1: float) -> float:
    """Arc length of the profile from the apex to height ``x1``."""
    par = DelaunayParams(H, t)
    x1 = _check_height(par, x1)
    return _branch_integral(par, x1, t, _arc_numer)


def half_span(H: float, t: float) -> float:
    """``x3`` extent of the branch from the apex to its far end."""
    par = DelaunayParams(H, t)
    return profile_x3(H, t, par.far_end)


def profile_c(H: float, t: float, x3: float) -> float:
    """Height of the (evenly extended) profile at abscissa ``x3``."""
    par = DelaunayParams(H, t)
    y = abs(float(x3))
    if y == 0.0:
        return t
    span = half_span(H, t)
    if y > span * (1 + 1e-13) + 1e-15:
        raise OutOfWindow(f"|x3| = {y} beyond the profile span {span}")
    lo, hi = par.window
    if y >= span:
        return par.far_end
    return optimize.brentq(lambda x: profile_x3(H, t, x) - y, lo, hi,
                           xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def profile_slope(H: float, t: float, x3: float) -> float:
    """``dc/dx3`` of the evenly extended profile."""
    par = DelaunayParams(H, t)
    x1 = profile_c(H, t, x3)
    d = D(H, t, x1)
    sign = 1.0 if par.neck else -1.0
    return sign * d * (1.0 if x3 >= 0 else -1.0)


def x_star(a: float, H: float, t: float) -> float:
    """``x3`` at which the profile ``c(H, t)`` has height ``a``."""
    return profile_x3(H, t, a)


def H_of_t(zone: ZoneSpec, t: float, dH0=1e-3, dH_max=0.5) -> float:
    """Mean curvature ``H`` whose profile through ``(0, t)`` meets the zone corner.

    Solves ``x_star(a, H, t) = sqrt(1 - a^2)``; ``x_star`` is decreasing in
    ``H`` so the root is bracketed by growing ``[1 - dH, 1 + dH]``.
    """
    a, target = zone.a, zone.w3
    if t == 1.0:
        return 1.0

    def phi(H):
        return x_star(a, H, t) - target

    dH = dH0
    while dH <= dH_max:
        lo, hi = 1.0 - dH, 1.0 + dH
        try:
            f_lo, f_hi = phi(lo), phi(hi)
        except (OutOfWindow, RadicandNegative) as exc:
            raise NoBracket(f"window check failed at dH = {dH}: {exc}") from exc
        if f_lo == 0.0:
            return lo
        if f_hi == 0.0:
            return hi
        if f_lo > 0 > f_hi:
            return optimize.brentq(phi, lo, hi, xtol=ROOT_XTOL,
                                   rtol=4 * np.finfo(float).eps)
        dH *= 2.0
    raise NoBracket(f"no sign change of x_star - sqrt(1-a^2) for t = {t}")


def _zone_x3(zone, x3):
    y = abs(float(x3))
    if y > zone.w3 * (1 + 1e-12):
        raise OutOfWindow("|x3| exceeds the zone boundary sqrt(1 - a^2)")
    return min(y, zone.w3)


def tilde_c(zone: ZoneSpec, t: float, x3: float) -> float:
    """``c(H^a(t), t)`` restricted to the zone."""
    y = _zone_x3(zone, x3)
    return profile_c(H_of_t(zone, t), t, y)


def hat_c(zone: ZoneSpec, t: float, x3: float) -> float:
    """``c(1, t)`` restricted to the zone."""
    y = _zone_x3(zone, x3)
    return profile_c(1.0, t, y)


# -- the unit mean curvature undulary --------------------------------------------

def _undulary_params(t):
    if not 0.0 < t < 0.5:
        raise DomainError("undulary needs 0 < t < 1/2")
    return DelaunayParams(1.0, t)


def half_period(t: float) -> float:
    """``x3`` distance from the neck ``x1 = t`` to the bulge ``x1 = 1 - t``."""
    _undulary_params(t)
    return half_span(1.0, t)


def undulary_x3(t: float, x1: float) -> float:
    """Inverse of the increasing branch: ``int_t^x1 dx / D(1, t, x)``."""
    par = _undulary_params(t)
    x1 = _check_height(par, x1)
    return _branch_integral(par, t, x1, _x3_numer)


def undulary(t: float, x3: float) -> float:
    """Height ``u_t(x3)`` of the unit mean curvature undulary with neck ``(0, t)``."""
    par = _undulary_params(t)
    y = abs(float(x3))
    if y == 0.0:
        return t
    hp = half_period(t)
    if y > hp * (1 + 1e-13):
        raise BeyondBulge(f"|x3| = {y} beyond the half period {hp}")
    if y >= hp:
        return 1.0 - t
    lo, hi = par.window
    return optimize.brentq(lambda x: undulary_x3(t, x) - y, lo, hi,
                           xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def undulary_circle_hit(t: float) -> tuple[float, float]:
    """Point ``Q_t = (x3, x1)`` where ``u_t`` meets the unit circle with ``x3 > 0``."""
    par = _undulary_params(t)
    lo, hi = par.window

    def phi(x):
        return undulary_x3(t, x) ** 2 + x * x - 1.0

    if phi(hi) < 0:
        raise NoIntersection(f"u_t stays inside the unit disk for t = {t}")
    x1 = optimize.brentq(phi, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    return undulary_x3(t, x1), x1


def undulary_height_hit(t: float, a: float) -> float:
    """``x3(P_t)``: abscissa where ``u_t`` first reaches height ``a``."""
    par = _undulary_params(t)
    lo, hi = par.window
    if not lo < a < hi:
        raise DomainError(f"need t < a < 1 - t, got t={t}, a={a}")
    return undulary_x3(t, a)


# -- sampled profiles ------------------------------------------------------

def delaunay_field(H: float):
    """Curvature field of a constant mean curvature profile: ``2H - cos(theta)/x1``."""
    def kappa(x3, x1, th):
        return 2.0 * H - math.cos(th) / x1
    return kappa


def neck_step_cap(frac=0.05):
    return lambda x3, x1, th: max(frac * x1, 1e-7)


def delaunay_curve(H: float, t: float, x1_end: float, max_step=1e-3) -> PlanarCurve:
    """Symmetric sampled profile through the apex ``(0, t)`` down (or up) to ``x1_end``.

    The curve is traversed in the ``+x3`` direction with ``theta = 0`` at
    the apex and is integrated in arc length, so its mean curvature is ``H``
    up to the integration error.
    """
    length = profile_arclength(H, t, x1_end)
    half = integrate_field(delaunay_field(H), (0.0, t, 0.0), length, max_step,
                           step_cap=neck_step_cap())
    left = half.mirrored()
    return PlanarCurve(
        np.concatenate([left.s[:-1] - left.s[-1], half.s]),
        np.concatenate([left.x3[:-1], half.x3]),
        np.concatenate([left.x1[:-1], half.x1]),
        np.concatenate([left.theta[:-1], half.theta]),
        np.concatenate([left.kappa[:-1], half.kappa]),
    )
