"""Zone-height function f(a, t), the threshold a0 and rigidity classification.

``f(a, t) = x_star(a, 1, t) - sqrt(1 - a^2)`` measures how far the unit
mean curvature Delaunay profile through ``(0, t)`` overshoots the zone
corner.  It has the closed form

    f(a, t) = (k - t/k) F(k, theta) + (t/k) E(k, theta) - sqrt(1 - a^2)

with ``k = t / sqrt(2t - 1)`` and ``theta = arccos(a / t)``.  Its first
two ``t``-derivatives at ``t = 1`` are ``g(a)`` and ``h(a)``; the sign of
``g`` decides which side of the unit sphere nearby profiles fall on.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import delaunay
from .curve import PlanarCurve, mean_curvature_samples
from .delaunay import ZoneSpec
from .elliptic import ellip_E, ellip_F, zone_args
from .errors import DomainError, ZoneCMCError
from .report import Check, VerificationReport, check_lower, check_upper

SQRT3_2 = math.sqrt(3.0) / 2.0
THRESHOLD_TOL = 1e-12
FD_STEPS = (1e-3, 5e-4, 2.5e-4)


def _check_a(a):
    if not 0.0 < a < 1.0:
        raise DomainError(f"zone parameter must lie in (0, 1), got {a}")


def f_elliptic(a: float, t: float) -> float:
    """Zone-height function through incomplete elliptic integrals."""
    _check_a(a)
    args = zone_args(a, t)
    k = args.k
    return (k - t / k) * ellip_F(args) + (t / k) * ellip_E(args) - math.sqrt(1.0 - a * a)


def f_quadrature(a: float, t: float) -> float:
    """Zone-height function by direct quadrature of the profile integral."""
    _check_a(a)
    return delaunay.x_star(a, 1.0, t) - math.sqrt(1.0 - a * a)


def f(a: float, t: float, method: str = "elliptic") -> float:
    """``x_a(t) - sqrt(1 - a^2)`` by the chosen evaluation path."""
    if method == "elliptic":
        return f_elliptic(a, t)
    if method == "quadrature":
        return f_quadrature(a, t)
    raise ValueError(f"unknown method {method!r}")


def _log_term(a):
    return math.log((1.0 + math.sqrt(1.0 - a * a)) / a)


def g(a: float) -> float:
    """``df/dt`` at ``t = 1``: ``-ln((1 + sqrt(1-a^2))/a) + 1/sqrt(1-a^2)``."""
    _check_a(a)
    return -_log_term(a) + 1.0 / math.sqrt(1.0 - a * a)


def h(a: float) -> float:
    """``d^2 f/dt^2`` at ``t = 1``: ``ln((1 + sqrt(1-a^2))/a) + (a^2-2)/(1-a^2)^{3/2}``."""
    _check_a(a)
    return _log_term(a) + (a * a - 2.0) / (1.0 - a * a) ** 1.5


def compute_a0(tol: float = 1e-12) -> float:
    """Bisection root of the increasing function ``g`` on ``(1/2, 1)``."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    lo, hi = 0.51, 0.99
    if not g(lo) < 0 < g(hi):
        raise ZoneCMCError("g does not change sign on [0.51, 0.99]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


A0 = compute_a0(1e-15)


@dataclass(frozen=True)
class RigidityConstants:
    a0: float = A0
    sqrt3_over_2: float = SQRT3_2


@dataclass(frozen=True)
class RigidityClass:
    """Which of the four rigidity properties the zone ``S_a`` has."""

    strong_h_plus: bool
    strong_h_minus: bool
    local_h_plus: bool
    local_h_minus: bool

    def to_dict(self) -> dict:
        return asdict(self)


def classify(a: float) -> RigidityClass:
    """Rigidity flags of ``S_a``; ties within 1e-12 of a threshold count as reached."""
    _check_a(a)
    return RigidityClass(
        strong_h_plus=a >= SQRT3_2 - THRESHOLD_TOL,
        strong_h_minus=False,
        local_h_plus=a >= A0 - THRESHOLD_TOL,
        local_h_minus=a > A0 + THRESHOLD_TOL,
    )


# -- finite differences --------------------------------------------------------

def richardson(values, order=2, ratio=2.0):
    """Richardson table on estimates at steps ``h, h/r, h/r^2, ...``.

    Assumes an even error expansion starting at ``h^order``.
    """
    row = list(values)
    p = order
    while len(row) > 1:
        fac = ratio ** p
        row = [(fac * row[i + 1] - row[i]) / (fac - 1.0) for i in range(len(row) - 1)]
        p += 2
    return row[0]


def fd_derivative(fun, x, order=1, steps=FD_STEPS):
    """Central difference of ``fun`` at ``x`` refined by Richardson extrapolation."""
    est = []
    f0 = fun(x) if order == 2 else None
    for hstep in steps:
        fp, fm = fun(x + hstep), fun(x - hstep)
        if order == 1:
            est.append((fp - fm) / (2 * hstep))
        elif order == 2:
            est.append((fp - 2 * f0 + fm) / (hstep * hstep))
        else:
            raise ValueError("order must be 1 or 2")
    return richardson(est, ratio=steps[0] / steps[1])


# -- verifiers -----------------------------------------------------------------

def _t_offsets(eta, n):
    return eta * np.geomspace(1.0, 1e-3, n)


def _h1_case(a):
    if abs(a - A0) <= THRESHOLD_TOL:
        return 3
    return 1 if a > A0 else 2


def _expected_signs(case):
    """Expected signs (t < 1, t > 1) of the tested quantity minus its reference."""
    return {1: (-1, 1), 2: (1, -1), 3: (-1, -1)}[case]


def verify_lemma_h1(a: float, eta: float = 0.005, n: int = 50,
                    methods=("elliptic", "quadrature")) -> VerificationReport:
    """Sign pattern of ``f(a, t)`` on both sides of ``t = 1``.

    The pattern is selected by comparing ``a`` with ``a0``: case 1 for
    ``a > a0`` (negative below, positive above), case 2 for ``a < a0``
    (reversed), case 3 at ``a = a0`` (negative on both sides). The grid is
    geometric towards ``t = 1``.
    """
    start = time.perf_counter()
    case = _h1_case(a)
    below, above = _expected_signs(case)
    offs = _t_offsets(eta, n)
    grid = sorted([float(1 - d) for d in offs] + [float(1 + d) for d in offs])
    rep = VerificationReport("h1", grid, 0.0, info={"a": a, "case": case, "a0": A0})
    for t in grid:
        sign = below if t < 1 else above
        for m in methods:
            try:
                val = f(a, t, m)
            except ZoneCMCError as exc:
                rep.checks.append(Check(f"f[{m}]", False, -math.inf, 0.0,
                                        {"t": t, "error": str(exc)}))
                continue
            margin = sign * val
            rep.checks.append(Check(f"sign f[{m}]", margin > 0, margin, 0.0,
                                    {"t": t, "f": val}))
    rep.elapsed = time.perf_counter() - start
    return rep


def verify_lemma_htwith1(a_values, t_values=(0.995, 1.005)) -> VerificationReport:
    """Sign pattern of ``H^a(t) - 1`` (same case split as for ``f``)."""
    start = time.perf_counter()
    grid = [[float(a), float(t)] for a in a_values for t in t_values]
    rep = VerificationReport("htwith1", grid, 0.0, info={"a0": A0})
    for a, t in grid:
        below, above = _expected_signs(_h1_case(a))
        sign = below if t < 1 else above
        try:
            H = delaunay.H_of_t(ZoneSpec(a), t)
        except ZoneCMCError as exc:
            rep.checks.append(Check("H_of_t", False, -math.inf, 0.0,
                                    {"a": a, "t": t, "error": str(exc)}))
            continue
        margin = sign * (H - 1.0)
        rep.checks.append(Check("sign H-1", margin > 0, margin, 0.0,
                                {"a": a, "t": t, "H": H}))
    rep.elapsed = time.perf_counter() - start
    return rep


def verify_lemma_tundu(t_grid) -> VerificationReport:
    """``u_t(1/2) < sqrt(3)/2`` for each neck height ``t``.

    When the half period of ``u_t`` is shorter than 1/2 the undulary never
    rises above its bulge ``1 - t``, which then bounds ``u_t(1/2)``.
    """
    start = time.perf_counter()
    grid = [float(t) for t in t_grid]
    rep = VerificationReport("tundu", grid, 0.0, info={"bound": SQRT3_2})
    for t in grid:
        hp = delaunay.half_period(t)
        if hp >= 0.5:
            value = delaunay.undulary(t, 0.5)
            how = "u_t(1/2)"
        else:
            value = 1.0 - t
            how = "bulge"
        margin = SQRT3_2 - value
        rep.checks.append(Check("u_t(1/2) < sqrt(3)/2", margin > 0, margin, 0.0,
                                {"t": t, "value": value, "via": how, "half_period": hp}))
    rep.elapsed = time.perf_counter() - start
    return rep


def cylinder_slice(t: float, half_width=1.0, n=201) -> PlanarCurve:
    """Generatrix ``x1 = t`` of the cylinder slice, traversed in ``+x3``."""
    s = np.linspace(-half_width, half_width, n)
    return PlanarCurve(s, s, np.full(n, t), np.zeros(n), np.zeros(n))


def arc_slice(t: float, n=401):
    """Minor arc through ``(-1/2, sqrt3/2)``, ``(0, t)``, ``(1/2, sqrt3/2)``.

    Returns the curve (traversed clockwise) and its radius.
    """
    if not SQRT3_2 < t < 1.0:
        raise DomainError("arc slices need sqrt(3)/2 < t < 1")
    c = (t * t - 1.0) / (2.0 * t - math.sqrt(3.0))
    r = t - c
    phi1 = math.asin(0.5 / r)
    phi = np.linspace(-phi1, phi1, n)
    curve = PlanarCurve(r * phi, r * np.sin(phi), c + r * np.cos(phi), -phi,
                        np.full(n, 1.0 / r))
    return curve, r


def slice_arc_bound(r: float) -> float:
    """Mean curvature of the arc slice at ``|x3| = 1/2``."""
    return 0.5 * (1.0 / r + math.sqrt(4 * r * r - 1.0) / (math.sqrt(3.0) * r))


def verify_slice_curvatures(t_grid) -> VerificationReport:
    """Mean curvature of the comparison slices stays below one.

    ``t <= sqrt(3)/2`` tests the cylinder of radius ``t`` (``H = 1/(2t)``);
    larger ``t`` tests the rotated arc through the zone corners at
    ``x1 = sqrt(3)/2``, whose mean curvature peaks at ``|x3| = 1/2``.
    """
    start = time.perf_counter()
    grid = [float(t) for t in t_grid]
    rep = VerificationReport("slices", grid, 1e-12)
    for t in grid:
        if t <= SQRT3_2:
            H = mean_curvature_samples(cylinder_slice(t))
            exact = 1.0 / (2.0 * t)
            err = float(np.max(np.abs(H - exact)))
            rep.checks.append(check_upper("cylinder H = 1/(2t)", err, 1e-12, 0.0,
                                          {"t": t, "H": exact}))
            rep.checks.append(Check("cylinder H < 1", exact < 1.0, 1.0 - exact, 0.0,
                                    {"t": t}))
        else:
            curve, r = arc_slice(t)
            H = mean_curvature_samples(curve)
            i = int(np.argmax(H))
            bound = slice_arc_bound(r)
            at_end = abs(abs(curve.x3[i]) - 0.5) < 1e-12
            rep.checks.append(Check("arc max at |x3| = 1/2", at_end,
                                    0.0 if at_end else -abs(abs(curve.x3[i]) - 0.5), 0.0,
                                    {"t": t, "x3": float(curve.x3[i])}))
            rep.checks.append(check_upper("arc max H = closed form",
                                          abs(float(H[i]) - bound), 1e-12, 0.0, {"t": t}))
            rep.checks.append(Check("arc H < 1", bound < 1.0, 1.0 - bound, 0.0,
                                    {"t": t, "H_max": bound, "radius": r}))
    rep.elapsed = time.perf_counter() - start
    return rep


APPENDIX_A = (0.3, 0.5, A0, 0.7, SQRT3_2)


def verify_appendix_derivatives(a_values=APPENDIX_A, tol1=1e-5, tol2=1e-4,
                                tol_a0=1e-6) -> VerificationReport:
    """Finite-difference ``t``-derivatives of ``f`` at ``t = 1`` against ``g`` and ``h``."""
    start = time.perf_counter()
    grid = [float(a) for a in a_values]
    rep = VerificationReport("appendix-derivatives", grid, tol1,
                             info={"steps": list(FD_STEPS), "tol_second": tol2})
    for a in grid:
        fun = lambda t, a=a: f_elliptic(a, t)
        d1 = fd_derivative(fun, 1.0, 1)
        d2 = fd_derivative(fun, 1.0, 2)
        rep.checks.append(check_upper("df/dt = g", abs(d1 - g(a)), tol1, 0.0,
                                      {"a": a, "fd": d1, "g": g(a)}))
        rep.checks.append(check_upper("d2f/dt2 = h", abs(d2 - h(a)), tol2, 0.0,
                                      {"a": a, "fd": d2, "h": h(a)}))
    closed = -(1.0 - A0 * A0) ** -1.5
    rep.checks.append(check_upper("h(a0) = -(1-a0^2)^(-3/2)", abs(h(A0) - closed), tol_a0,
                                  0.0, {"a0": A0, "h": h(A0), "closed": closed}))
    rep.elapsed = time.perf_counter() - start
    return rep


def elliptic_forms_grid(n=20, a_lo=0.25, a_hi=0.9):
    """``(a, t)`` pairs with ``|t - 1| <= min(0.05, a/2)`` on which both paths apply."""
    pairs = []
    for a in np.linspace(a_lo, a_hi, n):
        m = min(0.05, a / 2.0)
        for t in np.linspace(1.0 - m, 1.0 + m, n):
            pairs.append([float(a), float(t)])
    return pairs


def verify_elliptic_forms(n=20, tol=1e-7, tol_zero=1e-9) -> VerificationReport:
    """Closed-form ``f`` against direct quadrature, and ``f(a, 1) = 0``."""
    start = time.perf_counter()
    grid = elliptic_forms_grid(n)
    rep = VerificationReport("elliptic-forms", grid, tol, info={"tol_zero": tol_zero})
    worst = (0.0, None)
    for a, t in grid:
        diff = abs(f_elliptic(a, t) - f_quadrature(a, t))
        if diff >= worst[0]:
            worst = (diff, [a, t])
    rep.checks.append(check_upper("|f_elliptic - f_quadrature|", worst[0], tol, 0.0,
                                  {"a_t": worst[1]}))
    zero = (0.0, None)
    for a in sorted({p[0] for p in grid}):
        v = max(abs(f_elliptic(a, 1.0)), abs(f_quadrature(a, 1.0)))
        if v >= zero[0]:
            zero = (v, a)
    rep.checks.append(check_upper("|f(a, 1)|", zero[0], tol_zero, 0.0, {"a": zero[1]}))
    rep.elapsed = time.perf_counter() - start
    return rep
