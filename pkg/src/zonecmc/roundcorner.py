"""Smoothing a transversal corner between two profile curves.

Two arc-length curves ``r1`` (used for ``s <= 0``) and ``r2`` (used for
``s >= 0``) meet transversally at ``p = r1(0) = r2(0)``.  Each is bent, over
a window of length ``lam``, into a circle of curvature ``sigma * K``: the
curvature of ``r1`` is blended forward from an anchor ``s1`` and that of
``r2`` backward from ``s2``.  The anchors are chosen so that both circles
share their center; the corner is then replaced by the arc of that circle.
``sigma = sign(T2 . n1)`` is the orientation: with ``sigma = +1`` the
surface of revolution gains mean curvature on the blend, with ``-1`` it
loses it.

Everything the existence argument promises (locality, no self
intersection, one-sided mean curvature) is checked on the constructed
curve and reported, not assumed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .curve import PlanarCurve, _rk4_given_kappa, self_intersects
from .errors import (ConstraintViolation, DomainError, NoMatch, SearchExhausted,
                     VerificationFailure)
from .report import Check, VerificationReport, check_lower, check_upper

TWO_PI = 2.0 * math.pi
BLEND_STEPS = 200
MATCH_TOL = 1e-10
GRID = 64


def _wrap(x):
    """Angle in ``(-pi, pi]``."""
    return math.remainder(x, TWO_PI)


def mollifier(lam: float, x):
    """Smooth step ``s(x) / (s(x) + s(lam - x))`` with ``s(x) = exp(-1/x)`` for ``x > 0``.

    Written as ``1 / (1 + exp(1/x - 1/(lam - x)))`` inside ``(0, lam)`` so
    that it does not underflow to 0/0 for small ``lam``.
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    x = np.asarray(x, dtype=float)
    out = np.where(x >= lam, 1.0, 0.0)
    inside = (x > 0) & (x < lam)
    if np.any(inside):
        xi = x[inside]
        z = np.clip(1.0 / xi - 1.0 / (lam - xi), -700.0, 700.0)
        out = out.astype(float)
        out[inside] = 1.0 / (1.0 + np.exp(z))
    return out if out.ndim else float(out)


def blend_nodes(lam: float, n: int = BLEND_STEPS, m: int = 60) -> np.ndarray:
    """Offsets in ``[0, lam]``: a uniform grid plus nodes resolving the step of ``mu``.

    For small ``lam`` the mollifier rises within a layer of width about
    ``lam^2`` around ``lam/2``; the extra nodes are placed uniformly in
    ``y = 1/x - 1/(lam - x)`` over ``|y| <= m``.
    """
    y = np.linspace(-m, m, 2 * m + 1)
    y = y[y != 0.0]
    b = y * lam + 2.0
    x = (b - np.sqrt(b * b - 4.0 * y * lam)) / (2.0 * y)
    nodes = np.concatenate([np.linspace(0.0, lam, n + 1), x, [0.5 * lam]])
    nodes = np.unique(np.clip(nodes, 0.0, lam))
    keep = np.concatenate([[True], np.diff(nodes) > 1e-15 * lam])
    nodes = nodes[keep]
    nodes[-1] = lam
    return nodes


@dataclass(frozen=True)
class RoundCornerParams:
    """Blend length ``lam``, circle curvature ``K``, ball radius ``delta`` and orientation.

    ``epsilon`` is an output of ``glue``: the half-width, in the incoming
    parameter, of the region where the result differs from the inputs.
    """

    lam: float
    K: float
    delta: float
    orientation: int
    epsilon: float | None = None

    def to_dict(self):
        return {"lambda": self.lam, "K": self.K, "delta": self.delta,
                "orientation": self.orientation, "epsilon": self.epsilon}


@dataclass(frozen=True)
class CornerGeometry:
    """Angles and radii fixed by the corner before any blending."""

    p: tuple
    sigma: int
    theta1: float
    theta2: float
    theta: float
    theta_star: float
    beta: float
    alpha: float
    delta: float
    delta_prime: float
    d0: float
    eps2: float
    kappa_sup: float

    def to_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v)
                for k, v in self.__dict__.items()}


def orientation_of(r1: PlanarCurve, r2: PlanarCurve) -> int:
    """``sign(T2(0) . n1(0))``."""
    _, _, th1, _ = r1.at(0.0)
    _, _, th2, _ = r2.at(0.0)
    dot = math.cos(th2) * math.sin(th1) - math.sin(th2) * math.cos(th1)
    if dot == 0.0:
        raise ConstraintViolation("tangential corner: T2 . n1 = 0")
    return 1 if dot > 0 else -1


def beta_window(theta_star: float) -> float:
    """Upper end of the admissible interval for ``beta``."""
    return min(theta_star / 4.0, math.pi / 4.0 - theta_star / 2.0)


def corner_geometry(r1: PlanarCurve, r2: PlanarCurve, p, delta: float,
                    orientation: int | None = None) -> CornerGeometry:
    """Angle bookkeeping of the corner and the largest admissible window ``eps2``.

    ``theta = arg(T1 + T2)`` and ``theta*`` is the half opening angle, which
    must lie in ``(0, pi/2)`` (transversality).  ``beta`` is taken at the
    middle of its admissible interval, ``delta' = delta/4`` and ``d0`` just
    below ``x1(p) - delta``.  ``eps2`` is the largest window on which both
    tangents stay within ``beta`` of their corner values.
    """
    p = (float(p[0]), float(p[1]))
    for name, r in (("r1", r1), ("r2", r2)):
        q = r.position_at(0.0)
        if math.hypot(q[0] - p[0], q[1] - p[1]) > 1e-8:
            raise ConstraintViolation(f"{name}(0) is not the corner point")
    if p[1] <= 0:
        raise ConstraintViolation("corner must satisfy x1 > 0")
    sigma = orientation_of(r1, r2)
    if orientation is not None and orientation != sigma:
        raise ConstraintViolation(
            f"orientation {orientation} does not match sign(T2 . n1) = {sigma}")
    th1 = float(r1.at(0.0)[2])
    th2 = float(r2.at(0.0)[2])
    theta = math.atan2(math.sin(th1) + math.sin(th2), math.cos(th1) + math.cos(th2))
    theta_star = sigma * _wrap(th1 - theta)
    if not 1e-9 < theta_star < math.pi / 2 - 1e-9:
        raise ConstraintViolation(f"theta* = {theta_star} outside (0, pi/2)")
    beta = 0.5 * beta_window(theta_star)
    delta = min(delta, 0.5 * p[1])
    delta_prime = delta / 4.0
    d0 = 0.99 * (p[1] - delta)
    lo = max(-r1.s[0], 0.0)
    hi = max(r2.s[-1], 0.0)
    avail = min(r1.s[-1], -r2.s[0], lo, hi)
    eps = min(delta_prime, avail / 1.25)
    if eps <= 0:
        raise ConstraintViolation("input curves do not extend past the corner")
    while True:
        ss = np.linspace(-eps, eps, 101)
        d1 = np.abs(np.remainder(r1.at(ss)[2] - th1 + math.pi, TWO_PI) - math.pi)
        d2 = np.abs(np.remainder(r2.at(ss)[2] - th2 + math.pi, TWO_PI) - math.pi)
        if max(d1.max(), d2.max()) <= beta:
            break
        eps *= 0.8
        if eps < 1e-9:
            raise ConstraintViolation("no window keeps the tangents within beta")
    ss = np.linspace(-eps, eps, 101)
    a1 = sigma * np.array([_wrap(v - theta) for v in r1.at(ss)[2]])
    a2 = sigma * np.array([_wrap(theta - v) for v in r2.at(ss)[2]])
    alpha = min(a1.min(), (math.pi / 2 - a1).min(), a2.min(), (math.pi / 2 - a2).min(),
                0.999 * math.pi / 4)
    if alpha <= 0:
        raise ConstraintViolation("tangent angles leave the quarter planes around theta")
    span = np.linspace(-min(1.25 * eps, avail), min(1.25 * eps, avail), 201)
    ksup = float(max(np.abs(r1.at(span)[3]).max(), np.abs(r2.at(span)[3]).max()))
    return CornerGeometry(p, sigma, th1, th2, theta, theta_star, beta, alpha, delta,
                          delta_prime, d0, eps, ksup)


def _blend_window_kappa(r1, r2, geo, lam):
    span = np.linspace(-geo.eps2 - lam, geo.eps2 + lam, 401)
    return r1.at(span)[3], r2.at(span)[3]


def check_constraints(r1, r2, geo: CornerGeometry, params: RoundCornerParams):
    """List of ``Check`` records for the parameter inequalities."""
    lam, K, sig = params.lam, params.K, geo.sigma
    k1, k2 = _blend_window_kappa(r1, r2, geo, lam)
    gap = K - sig * np.concatenate([k1, k2])
    a_b, b_b = float(gap.min()), float(gap.max())
    return [
        check_upper("2 lam K < min(alpha, beta)", 2 * lam * K, min(geo.alpha, geo.beta)),
        check_upper("lam < d0/4", lam, geo.d0 / 4),
        check_lower("K > 2 sup|kappa| + 1/d0", K, 2 * geo.kappa_sup + 1 / geo.d0),
        check_upper("b < 2a for K - kappa in [a, b]", b_b, 2 * a_b,
                    witness={"a": a_b, "b": b_b}),
        check_lower("K - kappa > 0", a_b, 0.0),
        check_upper("lam + 1/K < delta'", lam + 1 / K, geo.delta_prime),
    ]


def _require(checks):
    bad = [c for c in checks if not c.passed]
    if bad:
        raise ConstraintViolation("violated: " + "; ".join(c.name for c in bad))


def half_polish(side: int, base: PlanarCurve, s0: float, params: RoundCornerParams,
                tail: float = 0.0, sigma: int | None = None):
    """Bend ``base`` into a circle of curvature ``sigma*K`` over ``lam``.

    ``side = 1`` blends forward from ``base(s0)`` (curvature
    ``kappa + (sigma K - kappa) mu(s - s0)``); ``side = 2`` blends backward
    from ``base(s0)`` with ``mu(s0 - s)``. The returned curve covers the
    blend window plus ``tail`` of the circle, in the parameter of ``base``.

    Returns
    -------
    (PlanarCurve, numpy.ndarray)
        The half-polished piece and the center of its circle.
    """
    lam, K = params.lam, params.K
    sig = params.orientation if sigma is None else sigma
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    if not (lam > 0 and K > 0):
        raise ConstraintViolation("need lam > 0 and K > 0")
    off = blend_nodes(lam)
    if tail > 0:
        nt = max(2, int(math.ceil(tail / (lam / BLEND_STEPS))))
        off = np.concatenate([off, lam + np.linspace(0, tail, nt + 1)[1:]])
    direction = 1.0 if side == 1 else -1.0
    # offsets finer than the resolution of s0 + off would collapse
    res = 64 * np.spacing(abs(s0) + lam + tail)
    keep = np.concatenate([[True], np.diff(off) > res])
    keep[-1] = True
    off = off[keep]
    if off.size > 2 and off[-1] - off[-2] <= res:
        off = np.delete(off, -2)
    nodes = s0 + direction * off
    mids = 0.5 * (nodes[1:] + nodes[:-1])
    target = sig * K

    def kap(s):
        x = direction * (s - s0)
        mu = mollifier(lam, x)
        out = np.full(s.shape, target)
        need = mu < 1.0
        if np.any(need):
            kb = base.at(s[need])[3]
            out[need] = kb + (target - kb) * mu[need]
        return out

    kn, km = kap(nodes), kap(mids)
    x3, x1, th, _ = base.at(s0)
    state = _rk4_given_kappa(nodes, kn, km, (float(x3), float(x1), float(th)))
    if side == 2:
        nodes, state, kn = nodes[::-1], state[::-1], kn[::-1]
    curve = PlanarCurve(nodes, state[:, 0], state[:, 1], state[:, 2], kn)
    i = -1 if side == 1 else 0
    end = np.array([curve.x3[i], curve.x1[i]])
    th_end = curve.theta[i]
    normal = np.array([math.sin(th_end), -math.cos(th_end)])
    center = end + normal / target
    return curve, center


def _center(side, base, s, params, sigma):
    return half_polish(side, base, s, params, sigma=sigma)[1]


def find_center_match(r1: PlanarCurve, r2: PlanarCurve, params: RoundCornerParams,
                      eps2: float, p=None, delta_prime=None, sigma=None):
    """Anchors ``(s1, s2)`` with ``O1(s1) = O2(s2)`` and the common center.

    A 64 x 64 grid over ``[-eps2, eps2]^2`` locates the closest pair of
    centers; damped Newton with a finite-difference Jacobian then drives the
    mismatch below ``1e-10``.
    """
    sig = params.orientation if sigma is None else sigma
    grid = np.linspace(-eps2, eps2, GRID)
    o1 = np.array([_center(1, r1, s, params, sig) for s in grid])
    o2 = np.array([_center(2, r2, s, params, sig) for s in grid])
    dist = np.hypot(o1[:, None, 0] - o2[None, :, 0], o1[:, None, 1] - o2[None, :, 1])
    i, j = np.unravel_index(int(np.argmin(dist)), dist.shape)
    x = np.array([grid[i], grid[j]])

    def F(v):
        return _center(1, r1, v[0], params, sig) - _center(2, r2, v[1], params, sig)

    fx = F(x)
    hstep = 1e-6 * eps2
    for _ in range(40):
        if np.hypot(*fx) < MATCH_TOL * 1e-2:
            break
        J = np.empty((2, 2))
        for c in range(2):
            e = np.zeros(2)
            e[c] = hstep
            J[:, c] = (F(x + e) - F(x - e)) / (2 * hstep)
        det = np.linalg.det(J)
        if abs(det) < 1e-10 * max(1.0, np.abs(J).max() ** 2):
            raise NoMatch("center curves are parallel (degenerate corner)")
        step = np.linalg.solve(J, -fx)
        t = 1.0
        while True:
            xn = np.clip(x + t * step, -eps2, eps2)
            fn = F(xn)
            if np.hypot(*fn) < np.hypot(*fx) or t < 1e-4:
                break
            t *= 0.5
        if np.hypot(*fn) >= np.hypot(*fx):
            break
        x, fx = xn, fn
    resid = float(np.hypot(*fx))
    if resid > MATCH_TOL:
        raise NoMatch(f"center mismatch {resid:.3g} above {MATCH_TOL}")
    center = 0.5 * (_center(1, r1, x[0], params, sig) + _center(2, r2, x[1], params, sig))
    if p is not None and delta_prime is not None:
        dp = math.hypot(center[0] - p[0], center[1] - p[1])
        if dp > delta_prime:
            raise NoMatch(f"common center {dp:.3g} from p exceeds delta' = {delta_prime:.3g}")
    return float(x[0]), float(x[1]), center


@dataclass
class CornerJoin:
    """Result of ``glue``: anchors, common center, connecting arc and assembled curve.

    The assembled curve uses the parameter of ``r1`` up to the end of the
    first blend and is arc length throughout; the part coming from ``r2``
    is shifted by ``shift`` (``r(s) = r2(s - shift)`` there).
    """

    s1: float
    s2: float
    center: np.ndarray
    arc: dict
    curve: PlanarCurve
    params: RoundCornerParams
    geometry: CornerGeometry
    shift: float
    p1: PlanarCurve
    p2: PlanarCurve
    report: VerificationReport = field(repr=False, default=None)

    def ledger(self) -> dict:
        d = self.params.to_dict()
        d.update({"s1": self.s1, "s2": self.s2, "center": list(map(float, self.center)),
                  "arc": self.arc, "shift": self.shift,
                  "geometry": self.geometry.to_dict(),
                  "checks": [c.to_dict() for c in self.report.checks] if self.report else []})
        return d

    def ledger_json(self) -> str:
        from .report import _plain
        return json.dumps(_plain(self.ledger()), indent=2) + "\n"


def _arc_curve(center, R, psi_a, span, sigma, theta_start, s_start, dpsi=2e-3):
    n = max(32, int(math.ceil(span / dpsi)))
    u = np.linspace(0.0, span, n + 1)
    psi = psi_a - sigma * u
    x3 = center[0] + R * np.cos(psi)
    x1 = center[1] + R * np.sin(psi)
    theta = theta_start - sigma * u
    return PlanarCurve(s_start + R * u, x3, x1, theta, np.full(n + 1, sigma / R))


def _hmean(kappa, theta, x1):
    return 0.5 * (kappa + np.cos(theta) / x1)


def glue(r1: PlanarCurve, r2: PlanarCurve, p, params: RoundCornerParams,
         tol: float = 1e-9, geometry: CornerGeometry | None = None) -> CornerJoin:
    """Replace the corner of ``r1``/``r2`` at ``p`` by a smooth round corner.

    Raises
    ------
    ConstraintViolation
        If ``params`` break one of the blending inequalities.
    NoMatch
        If the two center curves cannot be matched.
    VerificationFailure
        If the assembled curve fails a check; the exception carries the report.
    """
    geo = geometry or corner_geometry(r1, r2, p, params.delta, params.orientation)
    sig = geo.sigma
    _require(check_constraints(r1, r2, geo, params))
    lam, K = params.lam, params.K
    s1, s2, O = find_center_match(r1, r2, params, geo.eps2, geo.p, geo.delta_prime, sig)
    P1, _ = half_polish(1, r1, s1, params, sigma=sig)
    P2, _ = half_polish(2, r2, s2, params, sigma=sig)
    R = 1.0 / K
    a_pt = np.array([P1.x3[-1], P1.x1[-1]])
    b_pt = np.array([P2.x3[0], P2.x1[0]])
    psi_a = math.atan2(a_pt[1] - O[1], a_pt[0] - O[0])
    psi_b = math.atan2(b_pt[1] - O[1], b_pt[0] - O[0])
    span = (sig * (psi_a - psi_b)) % TWO_PI
    L = span * R
    arc = _arc_curve(O, R, psi_a, span, sig, P1.theta[-1], P1.s[-1])
    shift = arc.s[-1] - P2.s[0]
    # keep the angle of the r2 side on the branch reached along the arc
    turn = TWO_PI * round((arc.theta[-1] - P2.theta[0]) / TWO_PI)
    eps_s = 1e-12 * max(1.0, abs(s1))
    m1 = r1.s < s1 - eps_s
    m2 = r2.s > s2 + 1e-12 * max(1.0, abs(s2))
    parts = [
        (r1.s[m1], r1.x3[m1], r1.x1[m1], r1.theta[m1], r1.kappa[m1]),
        (P1.s, P1.x3, P1.x1, P1.theta, P1.kappa),
        (arc.s[1:-1], arc.x3[1:-1], arc.x1[1:-1], arc.theta[1:-1], arc.kappa[1:-1]),
        (P2.s + shift, P2.x3, P2.x1, P2.theta + turn, P2.kappa),
        (r2.s[m2] + shift, r2.x3[m2], r2.x1[m2], r2.theta[m2] + turn, r2.kappa[m2]),
    ]
    cols = [np.concatenate([pt[k] for pt in parts]) for k in range(5)]
    curve = PlanarCurve(*cols)
    epsilon = max(abs(s1), abs(s2)) + lam
    params = replace(params, epsilon=epsilon)
    arc_info = {"start": a_pt.tolist(), "end": b_pt.tolist(), "span": span,
                "radius": R, "length": L}
    join = CornerJoin(s1, s2, np.asarray(O), arc_info, curve, params, geo, shift, P1, P2)
    join.report = verify_join(join, r1, r2, tol)
    if not join.report.passed:
        rep = join.report
        raise VerificationFailure("round corner failed: " + ", ".join(
            c.name for c in rep.failures()), report=rep, witness=rep.witness,
            margin=rep.min_margin)
    return join


def verify_join(join: CornerJoin, r1: PlanarCurve, r2: PlanarCurve,
                tol: float = 1e-9) -> VerificationReport:
    """All a-posteriori checks of a round corner."""
    geo, prm = join.geometry, join.params
    sig, lam, K = geo.sigma, prm.lam, prm.K
    c, P1, P2 = join.curve, join.p1, join.p2
    rep = VerificationReport("round-corner", [float(lam), float(K)], tol,
                             info={"s1": join.s1, "s2": join.s2,
                                   "epsilon": prm.epsilon, "orientation": sig})
    checks = rep.checks
    eps = prm.epsilon
    # item 1: identical to the inputs outside the window
    m = c.s <= -eps
    k = np.searchsorted(r1.s, c.s[m])
    same1 = bool(np.all(r1.x3[k] == c.x3[m]) and np.all(r1.x1[k] == c.x1[m]))
    m = (c.s - join.shift) >= eps
    k = np.searchsorted(r2.s, c.s[m] - join.shift - 1e-12)
    same2 = bool(np.all(r2.x3[k] == c.x3[m]) and np.all(r2.x1[k] == c.x1[m]))
    checks.append(Check("identity outside [-eps, eps]", same1 and same2,
                        0.0 if same1 and same2 else -1.0, 0.0, {"epsilon": eps}))
    # item 2: locality and embeddedness
    blend = (c.s >= join.s1) & (c.s <= join.s2 + join.shift)
    dist = np.hypot(c.x3[blend] - geo.p[0], c.x1[blend] - geo.p[1])
    i = int(np.argmax(dist))
    checks.append(check_upper("d(r(s), p) < delta", float(dist[i]), geo.delta, 0.0,
                              {"s": float(c.s[blend][i])}))
    hit, pair = self_intersects(c)
    checks.append(Check("no self intersection", not hit, 0.0 if not hit else -1.0, 0.0,
                        {"segments": pair}))
    # item 3: one-sided mean curvature
    _, d1, t1, k1 = r1.at(P1.s)
    h1 = _hmean(k1, t1, d1)
    hp = _hmean(P1.kappa, P1.theta, P1.x1)
    gap = sig * (hp - h1)
    i = int(np.argmin(gap))
    checks.append(check_lower("H vs H1 on first blend", float(gap[i]), 0.0, tol,
                              {"s": float(P1.s[i])}))
    _, d2, t2, k2 = r2.at(P2.s)
    h2 = _hmean(k2, t2, d2)
    hq = _hmean(P2.kappa, P2.theta, P2.x1)
    gap2 = sig * (hq - h2)
    i = int(np.argmin(gap2))
    checks.append(check_lower("H vs H2 on second blend", float(gap2[i]), 0.0, tol,
                              {"s": float(P2.s[i])}))
    arc_m = (c.s > P1.s[-1]) & (c.s < P2.s[0] + join.shift)
    if np.any(arc_m):
        h_arc = _hmean(c.kappa[arc_m], c.theta[arc_m], c.x1[arc_m])
        win = np.linspace(-eps, eps, 201)
        h_in = np.concatenate([_hmean(*[r1.at(win)[j] for j in (3, 2, 1)]),
                               _hmean(*[r2.at(win)[j] for j in (3, 2, 1)])])
        arc_gap = (h_arc.min() - h_in.max()) if sig > 0 else (h_in.min() - h_arc.max())
        checks.append(check_lower("H on arc vs H_i on window", float(arc_gap), 0.0, tol))
    # sufficient condition of the comparison lemma, pointwise on both blends
    for name, P, d, t, kk in (("first", P1, d1, t1, k1), ("second", P2, d2, t2, k2)):
        lhs = sig * (P.kappa - kk)
        dm = np.minimum(d, P.x1)
        rhs = np.abs(d - P.x1) / dm ** 2 + np.abs(np.remainder(t - P.theta + math.pi,
                                                                 TWO_PI) - math.pi) / dm
        marg = lhs - rhs
        i = int(np.argmin(marg))
        checks.append(check_lower(f"comparison condition on {name} blend",
                                  float(marg[i]), 0.0, 1e-12, {"s": float(P.s[i])}))
    # angular control
    drift1 = np.abs(P1.theta - P1.theta[0]) - 2 * K * (P1.s - P1.s[0])
    drift2 = np.abs(P2.theta - P2.theta[-1]) - 2 * K * (P2.s[-1] - P2.s)
    checks.append(check_upper("angle drift <= 2 K lam'",
                              float(max(drift1.max(), drift2.max())), 0.0, 1e-12))
    phi1, phi2 = P1.theta[-1], P2.theta[0]
    checks.append(check_upper("|phi1(s1+lam) - theta1| <= 2 beta",
                              abs(_wrap(phi1 - geo.theta1)), 2 * geo.beta))
    checks.append(check_upper("|phi2(s2-lam) - theta2| <= 2 beta",
                              abs(_wrap(phi2 - geo.theta2)), 2 * geo.beta))
    a_pt, b_pt = join.arc["start"], join.arc["end"]
    chord = math.atan2(b_pt[1] - a_pt[1], b_pt[0] - a_pt[0])
    checks.append(check_upper("chord direction within 2 beta of theta",
                              abs(_wrap(chord - geo.theta)), 2 * geo.beta))
    checks.append(check_upper("minor arc", join.arc["span"], math.pi))
    checks.append(check_upper("arc length <= 2 pi / K", join.arc["length"],
                              TWO_PI / K, 1e-15))
    checks.append(Check("s1 <= 0 <= s2", join.s1 <= 0 <= join.s2,
                        min(-join.s1, join.s2), 0.0, {"s1": join.s1, "s2": join.s2}))
    # junction continuity, over the modified window and the steps entering it
    ds = np.diff(c.s)
    win = (c.s[1:] >= join.s1) & (c.s[:-1] <= join.s2 + join.shift)
    chord_len = np.hypot(np.diff(c.x3), np.diff(c.x1))
    res = np.where(win, np.abs(chord_len - ds), 0.0)
    j = int(np.argmax(res))
    checks.append(check_upper("arc-length continuity", float(res[j]),
                              1e-8, 0.0, {"s": float(c.s[j])}))
    dth = np.abs(np.diff(c.theta)) - np.abs(0.5 * (c.kappa[1:] + c.kappa[:-1]) * ds)
    dth = np.where(win, dth, -np.inf)
    j = int(np.argmax(dth))
    checks.append(check_upper("tangent continuity", float(dth[j]), 1e-8, 0.0,
                              {"s": float(c.s[j])}))
    return rep


def initial_params(r1, r2, geo: CornerGeometry):
    """Starting ``(lam, K)`` that satisfy the curvature inequalities with room."""
    K0 = max(3.5 * geo.kappa_sup + 1.0 / geo.d0, 8.0 / geo.delta_prime, 10.0)
    lam0 = 0.9 * min(geo.d0 / 4.0, min(geo.alpha, geo.beta) / (4.0 * K0),
                     geo.delta_prime / 8.0)
    return lam0, K0


def round_corner(r1: PlanarCurve, r2: PlanarCurve, p, delta: float,
                 orientation: int | None = None, max_doublings: int = 20,
                 tol: float = 1e-9) -> CornerJoin:
    """Search ``K = K0 2^k``, ``lam = lam0 / 2^k`` until ``glue`` succeeds."""
    geo = corner_geometry(r1, r2, p, delta, orientation)
    lam0, K0 = initial_params(r1, r2, geo)
    last = None
    for k in range(max_doublings):
        params = RoundCornerParams(lam0 / 2 ** k, K0 * 2 ** k, geo.delta, geo.sigma)
        try:
            join = glue(r1, r2, p, params, tol=tol, geometry=geo)
        except (ConstraintViolation, NoMatch, VerificationFailure) as exc:
            last = exc
            continue
        join.report.info["doublings"] = k
        return join
    raise SearchExhausted(f"no admissible (lam, K) after {max_doublings} doublings: {last}")


def auto_params(r1, r2, p, delta, orientation=None, max_doublings=20) -> RoundCornerParams:
    """First passing ``RoundCornerParams`` of the doubling search."""
    return round_corner(r1, r2, p, delta, orientation, max_doublings).params


__all__ = ["mollifier", "blend_nodes", "RoundCornerParams", "CornerGeometry",
           "CornerJoin", "orientation_of", "beta_window", "corner_geometry",
           "check_constraints", "half_polish", "find_center_match", "glue",
           "verify_join", "round_corner", "auto_params"]
