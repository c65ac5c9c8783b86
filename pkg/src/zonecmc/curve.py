"""Planar profile curves in the meridian half-plane.

Points are written ``(x3, x1)``: ``x3`` runs along the rotation axis and
``x1 > 0`` is the distance to it. A curve is sampled by arc length ``s`` and
carries its tangent angle ``theta = arg T`` with ``T = (cos theta, sin theta)``.

Sign convention (fixed once for the whole package): the normal ``n`` is ``T``
turned clockwise, ``n = (sin theta, -cos theta)``, and ``kappa = r'' . n``.
Hence ``dtheta/ds = -kappa`` and a circle traversed clockwise has
``kappa = +1/R``. With the normal of the surface of revolution induced by
``n``, its mean curvature is ``H = (kappa + cos(theta) / x1) / 2``; for the
unit circle traversed clockwise this is the inward normal and ``H = 1``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.spatial import cKDTree

from .errors import AxisContact, DomainError, DomainExit

AXIS_TOL = 1e-12
CSV_HEADER = "s,x3,x1,theta,kappa"


@dataclass(frozen=True, eq=False)
class PlanarCurve:
    """Arc-length sampled generatrix with tangent angle and curvature.

    Parameters
    ----------
    s, x3, x1, theta, kappa : array_like
        Equal-length 1-D arrays; ``s`` strictly increasing.
    """

    s: np.ndarray
    x3: np.ndarray
    x1: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray

    def __post_init__(self):
        arrays = []
        for name in ("s", "x3", "x1", "theta", "kappa"):
            arr = np.array(getattr(self, name), dtype=float).reshape(-1)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
            arrays.append(arr)
        n = arrays[0].size
        if any(a.size != n for a in arrays):
            raise ValueError("PlanarCurve arrays must have equal length")
        if n >= 2 and np.any(np.diff(self.s) <= 0):
            raise ValueError("arc length samples must be strictly increasing")

    def __len__(self):
        return self.s.size

    @property
    def pos(self) -> np.ndarray:
        return np.column_stack([self.x3, self.x1])

    @property
    def length(self) -> float:
        return float(self.s[-1] - self.s[0])

    @property
    def tangent(self) -> np.ndarray:
        return np.column_stack([np.cos(self.theta), np.sin(self.theta)])

    @property
    def normal(self) -> np.ndarray:
        return np.column_stack([np.sin(self.theta), -np.cos(self.theta)])

    # -- interpolation ---------------------------------------------------
    @cached_property
    def _splines(self):
        s = self.s
        return (
            CubicHermiteSpline(s, self.x3, np.cos(self.theta)),
            CubicHermiteSpline(s, self.x1, np.sin(self.theta)),
            CubicHermiteSpline(s, self.theta, -self.kappa),
            CubicSpline(s, self.kappa) if s.size >= 4 else None,
        )

    def at(self, s):
        """Interpolate ``(x3, x1, theta, kappa)`` at arc length ``s``.

        Position and angle use Hermite interpolation with their exact
        derivatives, so the error is fourth order in the sample spacing.
        """
        s_arr = np.asarray(s, dtype=float)
        lo, hi = self.s[0], self.s[-1]
        span = 1e-12 * max(1.0, abs(hi - lo))
        if np.any(s_arr < lo - span) or np.any(s_arr > hi + span):
            raise DomainError(f"s outside curve domain [{lo}, {hi}]")
        s_arr = np.clip(s_arr, lo, hi)
        sx3, sx1, sth, skap = self._splines
        kap = skap(s_arr) if skap is not None else np.interp(s_arr, self.s, self.kappa)
        return sx3(s_arr), sx1(s_arr), sth(s_arr), kap

    def position_at(self, s) -> np.ndarray:
        x3, x1, _, _ = self.at(s)
        return np.array([x3, x1]).T

    # -- rigid images ----------------------------------------------------
    def shifted(self, ds: float) -> "PlanarCurve":
        return PlanarCurve(self.s + ds, self.x3, self.x1, self.theta, self.kappa)

    def reversed(self) -> "PlanarCurve":
        """Same point set traversed backwards (normal and kappa flip)."""
        return PlanarCurve(
            (self.s[-1] - self.s)[::-1], self.x3[::-1], self.x1[::-1],
            (self.theta + math.pi)[::-1], -self.kappa[::-1],
        )

    def mirrored(self) -> "PlanarCurve":
        """Reflection ``x3 -> -x3`` traversed backwards.

        Reflecting reverses the orientation of the plane; reversing the
        traversal restores it, so kappa and the induced mean curvature are
        unchanged while theta maps to -theta.
        """
        return PlanarCurve(
            (self.s[-1] - self.s)[::-1], -self.x3[::-1], self.x1[::-1],
            -self.theta[::-1], self.kappa[::-1],
        )

    def thinned(self, min_ds: float = 1e-12) -> "PlanarCurve":
        """Drop samples closer than ``min_ds`` in arc length to the last kept one.

        The end point is always kept.
        """
        keep = [0]
        for i in range(1, self.s.size):
            if self.s[i] - self.s[keep[-1]] >= min_ds:
                keep.append(i)
        if keep[-1] != self.s.size - 1:
            keep[-1] = self.s.size - 1
        idx = np.array(keep)
        return PlanarCurve(self.s[idx], self.x3[idx], self.x1[idx],
                           self.theta[idx], self.kappa[idx])

    def window(self, s_lo: float, s_hi: float) -> "PlanarCurve":
        mask = (self.s >= s_lo) & (self.s <= s_hi)
        return PlanarCurve(self.s[mask], self.x3[mask], self.x1[mask],
                           self.theta[mask], self.kappa[mask])

    def check_invariants(self, pos_tol=1e-6, angle_tol=1e-6) -> dict:
        """Residuals of the sampling invariants.

        Returns the worst chord-versus-arc mismatch, the worst angle step
        mismatch against the trapezoidal integral of kappa, and min x1.
        """
        ds = np.diff(self.s)
        chord = np.hypot(np.diff(self.x3), np.diff(self.x1))
        dth = np.diff(self.theta)
        kint = -0.5 * (self.kappa[1:] + self.kappa[:-1]) * ds
        res = {
            "arc_residual": float(np.max(np.abs(chord - ds), initial=0.0)),
            "angle_residual": float(np.max(np.abs(dth - kint), initial=0.0)),
            "min_x1": float(np.min(self.x1)),
        }
        res["ok"] = (res["min_x1"] > 0 and res["arc_residual"] <= pos_tol
                     and res["angle_residual"] <= angle_tol)
        return res


def concat(pieces, drop_tol=1e-13) -> PlanarCurve:
    """Join curves end to start, re-indexing arc length cumulatively.

    A leading sample of a piece that duplicates the previous end point
    (within ``drop_tol``) is dropped.
    """
    cols = {k: [] for k in ("s", "x3", "x1", "theta", "kappa")}
    s_end = None
    last = None
    for piece in pieces:
        if len(piece) == 0:
            continue
        s = piece.s - piece.s[0]
        start = 0
        if last is not None:
            gap = math.hypot(piece.x3[0] - last[0], piece.x1[0] - last[1])
            if gap <= drop_tol:
                start = 1
                offset = s_end
            else:
                offset = s_end + gap
        else:
            offset = piece.s[0]
        cols["s"].append(s[start:] + offset)
        for k in ("x3", "x1", "theta", "kappa"):
            cols[k].append(getattr(piece, k)[start:])
        s_end = offset + s[-1]
        last = (piece.x3[-1], piece.x1[-1])
    joined = {k: np.concatenate(v) for k, v in cols.items()}
    joined["theta"] = np.unwrap(joined["theta"])
    return PlanarCurve(**joined)


# -- reconstruction from curvature -------------------------------------------

@dataclass(frozen=True)
class CurvatureProfile:
    """Curvature as a function of arc length plus a seed point.

    ``kappa_fn`` must accept a numpy array of arc lengths.
    """

    domain: tuple[float, float]
    kappa_fn: Callable[[np.ndarray], np.ndarray]
    s_start: float
    pos_start: tuple[float, float]
    theta_start: float

    def __post_init__(self):
        lo, hi = self.domain
        if not lo <= self.s_start <= hi:
            raise DomainError("seed must lie inside the profile domain")
        if self.pos_start[1] <= 0:
            raise DomainError("seed must satisfy x1 > 0")


def _rk4_given_kappa(s_nodes, k_nodes, k_mid, state0):
    """Classical RK4 for ``x3' = cos th, x1' = sin th, th' = -kappa(s)``."""
    n = s_nodes.size
    out = np.empty((n, 3))
    x3, x1, th = state0
    out[0] = state0
    cos, sin = math.cos, math.sin
    for i in range(n - 1):
        h = s_nodes[i + 1] - s_nodes[i]
        th2 = th - 0.5 * h * k_nodes[i]
        th3 = th - 0.5 * h * k_mid[i]
        th4 = th - h * k_mid[i]
        x3 += h / 6.0 * (cos(th) + 2 * cos(th2) + 2 * cos(th3) + cos(th4))
        x1 += h / 6.0 * (sin(th) + 2 * sin(th2) + 2 * sin(th3) + sin(th4))
        th -= h / 6.0 * (k_nodes[i] + 4 * k_mid[i] + k_nodes[i + 1])
        if x1 <= 0:
            raise DomainExit(f"curve reached the axis at s = {s_nodes[i + 1]:.6g}")
        out[i + 1] = (x3, x1, th)
    return out


def _uniform_nodes(a, b, step):
    n = max(1, int(math.ceil(abs(b - a) / step - 1e-9)))
    nodes = np.linspace(a, b, n + 1)
    nodes[-1] = b
    return nodes


def reconstruct(profile: CurvatureProfile, step: float) -> PlanarCurve:
    """Integrate a curve from its curvature (fundamental theorem of plane curves).

    Uses fixed-step classical RK4 from the seed towards both ends of the
    domain. Raises ``DomainExit`` if the curve reaches ``x1 <= 0``.
    """
    if not step > 0:
        raise DomainError("step must be positive")
    lo, hi = profile.domain
    s0 = profile.s_start
    state0 = (profile.pos_start[0], profile.pos_start[1], profile.theta_start)
    parts = []
    for end in (lo, hi):
        if end == s0:
            parts.append(None)
            continue
        nodes = _uniform_nodes(s0, end, step)
        mids = 0.5 * (nodes[1:] + nodes[:-1])
        kn = np.asarray(profile.kappa_fn(nodes), dtype=float) * np.ones_like(nodes)
        km = np.asarray(profile.kappa_fn(mids), dtype=float) * np.ones_like(mids)
        if not (np.all(np.isfinite(kn)) and np.all(np.isfinite(km))):
            raise DomainError("curvature is not finite on the domain")
        parts.append((nodes, kn, _rk4_given_kappa(nodes, kn, km, state0)))
    s_list, st_list, k_list = [], [], []
    back, fwd = parts
    if back is not None:
        s_list.append(back[0][::-1])
        st_list.append(back[2][::-1])
        k_list.append(back[1][::-1])
    if fwd is not None:
        skip = 1 if back is not None else 0
        s_list.append(fwd[0][skip:])
        st_list.append(fwd[2][skip:])
        k_list.append(fwd[1][skip:])
    if not s_list:
        raise DomainError("empty profile domain")
    s = np.concatenate(s_list)
    st = np.concatenate(st_list)
    return PlanarCurve(s, st[:, 0], st[:, 1], st[:, 2], np.concatenate(k_list))


def integrate_field(kappa_fn, state0, length, max_step, step_cap=None) -> PlanarCurve:
    """RK4 for a curvature that depends on the current point and angle.

    ``kappa_fn(x3, x1, theta)`` gives the curvature. The seed sits at
    ``s = 0`` and the curve runs to ``s = length`` (negative integrates
    backwards). ``step_cap(x3, x1, theta)`` may shorten steps locally, e.g.
    near a thin neck.
    """
    direction = 1.0 if length >= 0 else -1.0
    remaining = abs(length)
    x3, x1, th = state0
    s = 0.0
    rows = [(0.0, x3, x1, th, kappa_fn(x3, x1, th))]
    cos, sin = math.cos, math.sin
    total = abs(length)
    while remaining > 1e-13 * max(1.0, total):
        h = max_step
        if step_cap is not None:
            h = min(h, step_cap(x3, x1, th))
        if remaining - h < 0.25 * h:
            h = remaining
        h *= direction
        k1 = kappa_fn(x3, x1, th)
        a3, a1, at = cos(th), sin(th), -k1
        y3, y1, yt = x3 + 0.5 * h * a3, x1 + 0.5 * h * a1, th + 0.5 * h * at
        b3, b1, bt = cos(yt), sin(yt), -kappa_fn(y3, y1, yt)
        y3, y1, yt = x3 + 0.5 * h * b3, x1 + 0.5 * h * b1, th + 0.5 * h * bt
        c3, c1, ct = cos(yt), sin(yt), -kappa_fn(y3, y1, yt)
        y3, y1, yt = x3 + h * c3, x1 + h * c1, th + h * ct
        d3, d1, dt = cos(yt), sin(yt), -kappa_fn(y3, y1, yt)
        x3 += h / 6.0 * (a3 + 2 * b3 + 2 * c3 + d3)
        x1 += h / 6.0 * (a1 + 2 * b1 + 2 * c1 + d1)
        th += h / 6.0 * (at + 2 * bt + 2 * ct + dt)
        s += h
        remaining -= abs(h)
        if x1 <= 0:
            raise DomainExit(f"curve reached the axis at s = {s:.6g}")
        rows.append((s, x3, x1, th, kappa_fn(x3, x1, th)))
    arr = np.array(rows)
    arr[-1, 0] = direction * total
    if direction < 0:
        arr = arr[::-1]
    return PlanarCurve(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4])


def curvature_from_samples(curve: PlanarCurve) -> np.ndarray:
    """Second-order finite-difference estimate of kappa = -dtheta/ds."""
    return -np.gradient(curve.theta, curve.s, edge_order=2)


# -- mean curvature -------------------------------------------------------------

def _mean_curvature(kappa, theta, x1):
    x1 = np.asarray(x1, dtype=float)
    if np.any(x1 < AXIS_TOL):
        raise AxisContact("profile touches the rotation axis")
    return 0.5 * (np.asarray(kappa) + np.cos(theta) / x1)


def mean_curvature(curve: PlanarCurve, s: float) -> float:
    """Mean curvature of the surface of revolution at arc length ``s``."""
    _, x1, th, kap = curve.at(s)
    return float(_mean_curvature(kap, th, x1))


def mean_curvature_samples(curve: PlanarCurve) -> np.ndarray:
    """Mean curvature at every sample of ``curve``."""
    return _mean_curvature(curve.kappa, curve.theta, curve.x1)


def mean_curvature_graph(c, dc, d2c):
    """Mean curvature of the rotation of a graph ``x1 = c(x3)``.

    Expanded form of ``(c / sqrt(1 + c'^2))' / (c^2)'``; the normal points
    towards the axis. Works at ``c' = 0`` where the quotient form is 0/0.
    """
    c, dc, d2c = (np.asarray(v, dtype=float) for v in (c, dc, d2c))
    if np.any(c < AXIS_TOL):
        raise AxisContact("graph touches the rotation axis")
    w = 1.0 + dc * dc
    return (w - c * d2c) / (2.0 * c * w ** 1.5)


# -- self intersection -------------------------------------------------------

def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, cx, cy):
    return ((np.minimum(ax, bx) <= cx) & (cx <= np.maximum(ax, bx))
            & (np.minimum(ay, by) <= cy) & (cy <= np.maximum(ay, by)))


def _segments_cross(p, q, i, j):
    ax, ay = p[i, 0], p[i, 1]
    bx, by = q[i, 0], q[i, 1]
    cx, cy = p[j, 0], p[j, 1]
    dx, dy = q[j, 0], q[j, 1]
    d1 = _orient(cx, cy, dx, dy, ax, ay)
    d2 = _orient(cx, cy, dx, dy, bx, by)
    d3 = _orient(ax, ay, bx, by, cx, cy)
    d4 = _orient(ax, ay, bx, by, dx, dy)
    proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & \
             (((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0)))
    touch = ((d1 == 0) & _on_segment(cx, cy, dx, dy, ax, ay)) | \
            ((d2 == 0) & _on_segment(cx, cy, dx, dy, bx, by)) | \
            ((d3 == 0) & _on_segment(ax, ay, bx, by, cx, cy)) | \
            ((d4 == 0) & _on_segment(ax, ay, bx, by, dx, dy))
    return proper | touch


def _merge_close(pts, tol):
    """Indices of a subsequence of ``pts`` whose consecutive points are more than ``tol`` apart."""
    keep = [0]
    for i in range(1, pts.shape[0]):
        if math.hypot(*(pts[i] - pts[keep[-1]])) > tol:
            keep.append(i)
    last = pts.shape[0] - 1
    if keep[-1] != last:
        if len(keep) > 1:
            keep[-1] = last
        else:
            keep.append(last)
    return np.array(keep)


def self_intersects(curve: PlanarCurve, chunk=2_000_000, merge_tol=1e-13):
    """Test the sample polyline for contacts between non-adjacent segments.

    Consecutive samples closer than ``merge_tol`` are merged first; a
    segment of roundoff length would otherwise make its two neighbours
    touch. Candidate pairs come from a sort-and-sweep on the x3 extents of
    the segments followed by a bounding-box filter; survivors get an exact
    orientation test. A polyline whose last point repeats the first is
    treated as closed (first and last segments are then adjacent).

    Returns
    -------
    (bool, tuple or None)
        Whether a contact exists and the lexicographically first offending
        pair of segment indices (indices of the starting samples in
        ``curve``).
    """
    idx = _merge_close(curve.pos, merge_tol)
    hit, pair = _polyline_contacts(curve.pos[idx], chunk)
    if pair is not None:
        pair = (int(idx[pair[0]]), int(idx[pair[1]]))
    return hit, pair


def _polyline_contacts(pts, chunk):
    m = pts.shape[0] - 1
    if m < 2:
        return False, None
    p, q = pts[:-1], pts[1:]
    closed = bool(np.all(pts[0] == pts[-1]))
    xmin = np.minimum(p[:, 0], q[:, 0])
    xmax = np.maximum(p[:, 0], q[:, 0])
    ymin = np.minimum(p[:, 1], q[:, 1])
    ymax = np.maximum(p[:, 1], q[:, 1])
    order = np.argsort(xmin, kind="stable")
    xs = xmin[order]
    end = np.searchsorted(xs, xmax[order], side="right")
    counts = np.maximum(end - np.arange(m) - 1, 0)
    best = None
    k = 0
    while k < m:
        # grow the chunk until the candidate budget is used
        csum = np.cumsum(counts[k:])
        stop = k + max(1, int(np.searchsorted(csum, chunk, side="right")))
        cnt = counts[k:stop]
        total = int(cnt.sum())
        if total:
            rows = np.repeat(np.arange(k, stop), cnt)
            offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
            cols = rows + 1 + offs
            i = order[rows]
            j = order[cols]
            lo = np.minimum(i, j)
            hi = np.maximum(i, j)
            keep = (hi - lo > 1)
            if closed:
                keep &= ~((lo == 0) & (hi == m - 1))
            keep &= (ymin[lo] <= ymax[hi]) & (ymin[hi] <= ymax[lo])
            lo, hi = lo[keep], hi[keep]
            if lo.size:
                hit = _segments_cross(p, q, lo, hi)
                if np.any(hit):
                    cand = np.lexsort((hi[hit], lo[hit]))[0]
                    pair = (int(lo[hit][cand]), int(hi[hit][cand]))
                    if best is None or pair < best:
                        best = pair
        k = stop
    return (best is not None), best


def hausdorff_to(curve: PlanarCurve, reference: PlanarCurve) -> float:
    """Symmetric discrete Hausdorff distance between the two sample sets."""
    a, b = curve.pos, reference.pos
    if a.size == 0 or b.size == 0:
        raise DomainError("both curves must be non-empty")
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return float(max(da.max(), db.max()))


# -- serialization ------------------------------------------------------------

def _fmt(v: float) -> str:
    return np.format_float_positional(float(v), unique=True, trim="-")


def curve_to_csv(curve: PlanarCurve) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for row in zip(curve.s, curve.x3, curve.x1, curve.theta, curve.kappa):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(curve: PlanarCurve, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(curve_to_csv(curve))


def read_csv(path) -> PlanarCurve:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return PlanarCurve(*data.T)


SVG_BOX = (-3.2, -0.3, 3.2, 3.4)  # x3 min, x1 min, x3 max, x1 max
SVG_SCALE = 100.0


def curve_to_svg(curve: PlanarCurve, title="profile", reference_circle=True) -> str:
    """Fixed-viewbox SVG of the profile with the axis and the unit circle."""
    x0, y0, x1_, y1_ = SVG_BOX
    width = (x1_ - x0) * SVG_SCALE
    height = (y1_ - y0) * SVG_SCALE

    def tr(u, v):
        return (u - x0) * SVG_SCALE, (y1_ - v) * SVG_SCALE

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f"<title>{title}</title>",
    ]
    ax_a, ax_b = tr(x0, 0.0), tr(x1_, 0.0)
    lines.append(f'<line x1="{ax_a[0]:.3f}" y1="{ax_a[1]:.3f}" x2="{ax_b[0]:.3f}" '
                 f'y2="{ax_b[1]:.3f}" stroke="#888" stroke-dasharray="6 4"/>')
    if reference_circle:
        phi = np.linspace(0.0, math.pi, 361)
        ref = " ".join("%.3f,%.3f" % tr(math.cos(f), math.sin(f)) for f in phi)
        lines.append(f'<polyline points="{ref}" fill="none" stroke="#bbb"/>')
    pts = " ".join("%.3f,%.3f" % tr(u, v) for u, v in zip(curve.x3, curve.x1))
    lines.append(f'<polyline points="{pts}" fill="none" stroke="#c00" stroke-width="1.5"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(curve: PlanarCurve, path, title="profile") -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(curve_to_svg(curve, title=title))
