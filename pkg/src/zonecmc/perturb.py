"""Explicit perturbations of the unit sphere supported in an equatorial zone.

Each builder produces a closed generatrix (pole to pole in the upper half
plane, symmetric about the ``x1`` axis) that agrees with the unit circle on
both polar caps ``x1 <= a`` and whose surface of revolution has mean
curvature on one side of 1:

* ``global_h_minus``: the unit circle with a reflected bump, ``H <= 1``.
* ``global_h_plus``: the unit circle replaced near the equator by a unit
  mean curvature undulary with a thin neck, ``H >= 1``.
* ``local_h_plus`` / ``local_h_minus``: the unit circle replaced by the
  nearby Delaunay profile ``c(1, t')`` between its two crossings with the
  circle, ``H >= 1`` for ``t' < 1`` and ``H <= 1`` for ``t' > 1``.

The corners where the pieces meet are rounded by ``roundcorner`` and the
finished curve is certified sample by sample.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import delaunay
from .curve import PlanarCurve, integrate_field, mean_curvature_samples, self_intersects
from .delaunay import ZoneSpec
from .errors import (ConstraintViolation, CrossingNotFound, DomainError, GlueFailure,
                     NoMatch, SearchExhausted, VerificationFailure, WindowFailure,
                     ZoneCMCError)
from .report import Check, VerificationReport, check_lower, check_upper
from .rigidity import SQRT3_2
from .roundcorner import CornerJoin, round_corner

MODES = ("global_h_minus", "global_h_plus", "local_h_plus", "local_h_minus")
POLE_GAP = 1e-6
STEP = 1e-3
T_MIN = 1e-4
DEFAULT_TOL = 1e-6


@dataclass
class PerturbationResult:
    """Perturbed generatrix with its certificate and the values chosen on the way."""

    curve: PlanarCurve
    mode: str
    a: float
    certificate: VerificationReport | None = None
    construction_log: dict = field(default_factory=dict)
    join: CornerJoin | None = field(default=None, repr=False)

    @property
    def sup_distance(self) -> float:
        """Largest distance of the curve from the unit circle."""
        return float(np.max(np.abs(np.hypot(self.curve.x3, self.curve.x1) - 1.0)))


# -- pieces ------------------------------------------------------------------

def _grid_through_zero(lo, hi, h=STEP):
    left = np.linspace(lo, 0.0, max(1, int(math.ceil(-lo / h))) + 1) if lo < 0 else np.array([0.0])
    right = np.linspace(0.0, hi, max(1, int(math.ceil(hi / h))) + 1) if hi > 0 else np.array([0.0])
    return np.concatenate([left, right[1:]])


def circle_piece(center, R, p, s_lo, s_hi, h=STEP) -> PlanarCurve:
    """Clockwise circle through ``p`` with ``p`` at ``s = 0``, sampled on ``[s_lo, s_hi]``."""
    psi_p = math.atan2(p[1] - center[1], p[0] - center[0])
    s = _grid_through_zero(s_lo, s_hi, h)
    psi = psi_p - s / R
    x3 = center[0] + R * np.cos(psi)
    x1 = center[1] + R * np.sin(psi)
    x3[s == 0.0] = p[0]
    x1[s == 0.0] = p[1]
    return PlanarCurve(s, x3, x1, psi - math.pi / 2, np.full(s.size, 1.0 / R))


def unit_circle_from_left_pole(p, margin, h=STEP) -> PlanarCurve:
    """Unit circle from near the left pole ``(-1, 0)`` up to ``p`` and ``margin`` beyond."""
    psi_p = math.atan2(p[1], p[0])
    return circle_piece((0.0, 0.0), 1.0, p, psi_p - math.pi + POLE_GAP, margin, h)


def unit_circle_to_right_pole(p, margin, h=STEP) -> PlanarCurve:
    """Unit circle from ``margin`` before ``p`` down to near the right pole ``(1, 0)``."""
    psi_p = math.atan2(p[1], p[0])
    return circle_piece((0.0, 0.0), 1.0, p, -margin, psi_p - POLE_GAP, h)


def delaunay_piece(H, t, x1_corner, margin, toward_apex: bool, h=STEP) -> PlanarCurve:
    """Profile ``c(H, t)`` between its apex ``(0, t)`` and the height ``x1_corner``.

    Integrated in arc length from the apex (``theta = 0``); the corner sits
    at ``s = 0`` and the piece extends ``margin`` past it.  With
    ``toward_apex`` the piece runs from the corner (left of the apex) to
    the apex; otherwise from the apex rightwards to the corner.
    """
    L = delaunay.profile_arclength(H, t, x1_corner)
    field_ = delaunay.delaunay_field(H)
    cap = delaunay.neck_step_cap()
    if toward_apex:
        c = integrate_field(field_, (0.0, t, 0.0), -(L + margin), h, step_cap=cap)
        return c.shifted(L)
    c = integrate_field(field_, (0.0, t, 0.0), L + margin, h, step_cap=cap)
    return c.shifted(-L)


# -- assembly ------------------------------------------------------------------

def _normalize_apex(half: PlanarCurve, apex_last: bool) -> PlanarCurve:
    i = -1 if apex_last else 0
    turn = 2 * math.pi * round(half.theta[i] / (2 * math.pi))
    x3 = np.array(half.x3)
    x3[i] = 0.0
    theta = np.array(half.theta) - turn
    theta[i] = 0.0
    return PlanarCurve(half.s - half.s[0], x3, half.x1, theta, half.kappa)


def symmetric_profile(half: PlanarCurve, apex_last: bool) -> PlanarCurve:
    """Join ``half`` with its reflection ``x3 -> -x3`` at the apex on the ``x1`` axis."""
    half = _normalize_apex(half.thinned(1e-12 * max(1.0, half.length)), apex_last)
    mirror = half.mirrored()
    first, second = (half, mirror) if apex_last else (mirror, half)
    s2 = second.s - second.s[0] + first.s[-1]
    return PlanarCurve(
        np.concatenate([first.s, s2[1:]]),
        np.concatenate([first.x3, second.x3[1:]]),
        np.concatenate([first.x1, second.x1[1:]]),
        np.concatenate([first.theta, second.theta[1:]]),
        np.concatenate([first.kappa, second.kappa[1:]]),
    )


def _glue(r_in, r_out, p, delta, orientation, log):
    try:
        join = round_corner(r_in, r_out, p, delta, orientation)
    except (SearchExhausted, ConstraintViolation, NoMatch, VerificationFailure) as exc:
        raise GlueFailure(f"corner rounding failed: {exc}", ledger=log) from exc
    log["corner"] = {"p": list(p), "delta": delta, "orientation": orientation,
                     "lambda": join.params.lam, "K": join.params.K,
                     "epsilon": join.params.epsilon, "s1": join.s1, "s2": join.s2,
                     "doublings": join.report.info.get("doublings")}
    return join


def _finish(mode, a, half, apex_last, join, log, tol):
    curve = symmetric_profile(half, apex_last)
    res = PerturbationResult(curve, mode, a, None, log, join)
    log["sup_distance"] = res.sup_distance
    log["max_x1"] = float(curve.x1.max())
    log["min_radius"] = float(np.hypot(curve.x3, curve.x1).min())
    res.certificate = certify(res, tol)
    if not res.certificate.passed:
        rep = res.certificate
        raise VerificationFailure(f"{mode} certificate failed", report=rep,
                                  witness=rep.witness, margin=rep.min_margin)
    return res


# -- builders -------------------------------------------------------------------

def build_global_h_minus(a: float, tol: float = DEFAULT_TOL) -> PerturbationResult:
    """Unit circle with the arc above ``x1 = a'`` reflected across that line, ``H <= 1``."""
    zone = ZoneSpec(a)
    ap = 0.5 * (1.0 + zone.a)
    wp = math.sqrt(1.0 - ap * ap)
    p = (-wp, ap)
    delta = 0.5 * (ap - a)
    margin = delta
    r1 = unit_circle_from_left_pole(p, margin)
    center = (0.0, 2.0 * ap)
    psi_p = math.atan2(p[1] - center[1], p[0] - center[0])
    s_top = psi_p + 1.5 * math.pi
    r2 = circle_piece(center, 1.0, p, -margin, s_top)
    log = {"a_prime": ap, "delta": delta, "corner": None}
    join = _glue(r1, r2, p, delta, -1, log)
    return _finish("global_h_minus", a, join.curve, True, join, log, tol)


def global_plus_margin(a: float) -> float:
    """Margin required below ``sqrt(1-a^2)`` for ``x3(P_t)`` in the automatic search."""
    slack = 2.0 * math.sqrt(1.0 - a * a) - 1.0
    return min(0.02, max(slack, 0.0) / 4.0)


def _global_plus_window(a, t, margin):
    if not 0 < t < min(a, 1.0 - a, 0.5):
        return False, None
    x3p = delaunay.undulary_height_hit(t, a)
    return x3p < math.sqrt(1.0 - a * a) - margin, x3p


def build_global_h_plus(a: float, t="auto", tol: float = DEFAULT_TOL,
                        t_min: float = T_MIN) -> PerturbationResult:
    """Unit circle with the equatorial band replaced by the undulary ``u_t``, ``H >= 1``."""
    zone = ZoneSpec(a)
    tried = []
    if t == "auto":
        margin = global_plus_margin(a)
        candidates = []
        tt = min(0.25, a / 2.0)
        while tt >= t_min:
            candidates.append(tt)
            tt /= 2.0
    else:
        margin = 0.0
        candidates = [float(t)]
    last = None
    for tt in candidates:
        ok, x3p = _global_plus_window(zone.a, tt, margin)
        tried.append({"t": tt, "x3_P": x3p, "window": ok})
        if not ok:
            continue
        try:
            x3q, x1q = delaunay.undulary_circle_hit(tt)
            if not x1q > a:
                continue
            delta = 0.5 * (x1q - a)
            log = {"t": tt, "x3_P": x3p, "Q": [x3q, x1q], "delta": delta,
                   "margin": margin, "tried": tried}
            r_in = delaunay_piece(1.0, tt, x1q, delta, toward_apex=False)
            r_out = unit_circle_to_right_pole((x3q, x1q), delta)
            join = _glue(r_in, r_out, (x3q, x1q), delta, 1, log)
            return _finish("global_h_plus", a, join.curve, False, join, log, tol)
        except (GlueFailure, ZoneCMCError) as exc:
            last = exc
            continue
    raise WindowFailure(f"no admissible t >= {t_min} for a = {a}"
                        + (f" (last error: {last})" if last else ""))


def find_crossing(a: float, t_prime: float, n: int = 400):
    """Outermost crossing ``(x3_hat, x1_hat)`` of ``c(1, t')`` with the unit circle.

    Scans ``x1`` upward from ``a`` for the first sign change of
    ``x3_profile(x1) - sqrt(1 - x1^2)``.
    """
    hi = min(t_prime, 1.0)
    par = delaunay.DelaunayParams(1.0, t_prime)
    if not par.contains(a) or a >= hi:
        raise CrossingNotFound(f"height a = {a} not on the profile c(1, {t_prime})")

    def phi(x):
        return delaunay.profile_x3(1.0, t_prime, x) - math.sqrt(max(0.0, 1.0 - x * x))

    xs = np.linspace(a, hi, n + 1)
    vals = np.array([phi(x) for x in xs])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if vals[0] == 0.0:
        raise CrossingNotFound("crossing sits on the zone boundary")
    if idx.size == 0:
        raise CrossingNotFound(f"c(1, {t_prime}) does not cross the unit circle above x1 = {a}")
    i = int(idx[0])
    x1 = optimize.brentq(phi, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return math.sqrt(1.0 - x1 * x1), x1


def _local_build(mode, a, t_prime, tol):
    plus = mode == "local_h_plus"
    x3h, x1h = find_crossing(a, t_prime)
    if not x1h > a:
        raise CrossingNotFound("crossing height does not exceed a")
    slope = -delaunay.D(1.0, t_prime, x1h)
    circle_slope = -math.sqrt(1.0 / (x1h * x1h) - 1.0)
    transversal = slope > circle_slope if plus else slope < circle_slope
    log = {"t_prime": t_prime, "x3_hat": x3h, "x1_hat": x1h, "slope": slope,
           "circle_slope": circle_slope, "transversal": transversal}
    if not transversal:
        raise CrossingNotFound("slope condition at the crossing fails")
    delta = 0.5 * (x1h - a)
    log["delta"] = delta
    p = (-x3h, x1h)
    r_in = unit_circle_from_left_pole(p, delta)
    r_out = delaunay_piece(1.0, t_prime, x1h, delta, toward_apex=True)
    join = _glue(r_in, r_out, p, delta, 1 if plus else -1, log)
    return _finish(mode, a, join.curve, True, join, log, tol)


def _local_auto(mode, a, t_prime, tol, sign, max_halvings=8):
    ZoneSpec(a)
    if t_prime != "auto":
        t = float(t_prime)
        if sign * (t - 1.0) <= 0:
            raise DomainError(f"{mode} needs t' on the {'upper' if sign > 0 else 'lower'} side of 1")
        return _local_build(mode, a, t, tol)
    last = None
    for k in range(max_halvings):
        t = 1.0 + sign * 0.01 / 2 ** k
        try:
            res = _local_build(mode, a, t, tol)
        except CrossingNotFound as exc:
            last = exc
            continue
        except (GlueFailure, VerificationFailure) as exc:
            last = exc
            continue
        res.construction_log["auto_halvings"] = k
        return res
    if isinstance(last, CrossingNotFound):
        raise last
    raise GlueFailure(f"{mode}: no t' found ({last})")


def build_local_h_plus(a: float, t_prime="auto", tol: float = DEFAULT_TOL) -> PerturbationResult:
    """Replace the zone by ``c(1, t')`` with ``t' < 1`` between its crossings, ``H >= 1``."""
    return _local_auto("local_h_plus", a, t_prime, tol, -1)


def build_local_h_minus(a: float, t0_prime="auto", tol: float = DEFAULT_TOL) -> PerturbationResult:
    """Replace the zone by ``c(1, t0')`` with ``t0' > 1`` between its crossings, ``H <= 1``."""
    return _local_auto("local_h_minus", a, t0_prime, tol, 1)


BUILDERS = {
    "global_h_minus": build_global_h_minus,
    "global_h_plus": build_global_h_plus,
    "local_h_plus": build_local_h_plus,
    "local_h_minus": build_local_h_minus,
}


def build(mode: str, a: float, **kwargs) -> PerturbationResult:
    mode = mode.replace("-", "_").replace("hminus", "h_minus").replace("hplus", "h_plus")
    if mode not in BUILDERS:
        raise DomainError(f"unknown mode {mode!r}")
    return BUILDERS[mode](a, **kwargs)


# -- certificate ----------------------------------------------------------------

def _cap_end(curve, a, from_start=True):
    x1 = curve.x1 if from_start else curve.x1[::-1]
    above = np.nonzero(x1 > a)[0]
    return int(above[0]) if above.size else x1.size


def certify(result: PerturbationResult, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check the mean curvature bound, embeddedness, caps, symmetry and smoothness."""
    start = time.perf_counter()
    c, a = result.curve, result.a
    rep = VerificationReport(f"perturb-{result.mode}", [float(a)], tol,
                             info={"mode": result.mode, "samples": len(c)})
    checks = rep.checks
    # mean curvature bound
    H = mean_curvature_samples(c)
    if result.mode.endswith("h_minus"):
        i = int(np.argmax(H))
        checks.append(check_upper("H <= 1", float(H[i]), 1.0, tol, {"index": i, "s": float(c.s[i])}))
    else:
        i = int(np.argmin(H))
        checks.append(check_lower("H >= 1", float(H[i]), 1.0, tol, {"index": i, "s": float(c.s[i])}))
    # embeddedness
    hit, pair = self_intersects(c)
    checks.append(Check("no self intersection", not hit, 0.0 if not hit else -1.0, 0.0,
                        {"segments": pair}))
    checks.append(check_lower("x1 > 0", float(c.x1.min()), 0.0, 0.0))
    # identity on the polar caps x1 <= a of the unit sphere
    cap_len = math.asin(a) - POLE_GAP
    worst, where = 0.0, None
    covered = math.inf
    for from_start in (True, False):
        n_cap = _cap_end(c, a, from_start)
        sl = slice(0, n_cap) if from_start else slice(len(c) - n_cap, len(c))
        r = np.abs(np.hypot(c.x3[sl], c.x1[sl]) - 1.0)
        if r.size and r.max() > worst:
            k = int(np.argmax(r))
            worst, where = float(r[k]), (k if from_start else len(c) - n_cap + k)
        length = (c.s[n_cap - 1] - c.s[0]) if from_start else (c.s[-1] - c.s[len(c) - n_cap])
        covered = min(covered, float(length))
    checks.append(check_upper("caps on the unit circle", worst, 1e-10, 0.0, {"index": where}))
    checks.append(check_lower("caps fully covered", covered, cap_len - 2 * STEP, 0.0))
    # symmetry about the x1 axis
    sym = max(float(np.max(np.abs(c.x3 + c.x3[::-1]))), float(np.max(np.abs(c.x1 - c.x1[::-1]))))
    checks.append(check_upper("mirror symmetry", sym, 1e-12, 0.0))
    # smoothness: chords agree with the sampled tangent and arc length
    ds = np.diff(c.s)
    dx3, dx1 = np.diff(c.x3), np.diff(c.x1)
    arc_res = np.abs(np.hypot(dx3, dx1) - ds)
    k = int(np.argmax(arc_res))
    checks.append(check_upper("chord length = arc length", float(arc_res[k]), 1e-8, 0.0,
                              {"index": k}))
    th_mid = 0.5 * (c.theta[1:] + c.theta[:-1])
    perp = np.abs(np.cos(th_mid) * dx1 - np.sin(th_mid) * dx3)
    # the tangent turns by at most ds * max|kappa| / 2 away from the midpoint
    # direction; allow that, plus roundoff
    kmax = np.maximum(np.abs(c.kappa[1:]), np.abs(c.kappa[:-1])) + np.abs(np.diff(c.kappa))
    cross = np.maximum(perp - 1e-13, 0.0) / ds - 0.5 * ds * kmax
    k = int(np.argmax(cross))
    checks.append(check_upper("chord along tangent", float(cross[k]), 1e-6, 0.0, {"index": k}))
    # -dtheta = int kappa ds lies between the endpoint curvatures times ds when
    # kappa is monotone over the step (also across unresolved blend layers)
    turn = -np.diff(c.theta)
    lo = np.minimum(c.kappa[1:], c.kappa[:-1]) * ds
    hi = np.maximum(c.kappa[1:], c.kappa[:-1]) * ds
    dth = np.maximum(lo - turn, turn - hi).clip(min=0.0)
    rel = dth / (1e-6 + np.abs(turn))
    k = int(np.argmax(rel))
    checks.append(check_upper("angle increments match curvature", float(rel[k]), 1e-2, 0.0,
                              {"index": k}))
    rep.elapsed = time.perf_counter() - start
    return rep
