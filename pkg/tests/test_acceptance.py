"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a single ``[AC-nn] PASS|FAIL`` line (visible without ``-s``)
before asserting.
"""

import math
import subprocess
import sys

import numpy as np
import pytest

from zonecmc import delaunay, perturb, rigidity
from zonecmc.curve import (PlanarCurve, curvature_from_samples, mean_curvature_graph,
                           mean_curvature_samples)
from zonecmc.rigidity import A0, SQRT3_2


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[AC-{number:02d}] {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def test_ac01_threshold(verdict):
    a0 = rigidity.compute_a0(1e-12)
    res = abs(rigidity.g(a0))
    verdict(1, round(a0, 4) == 0.5524 and res < 1e-10,
            f"a0 = {a0:.12f}, |g(a0)| = {res:.2e}")


def test_ac02_semicircle(verdict):
    x3 = np.linspace(0.0, 0.95, 200)
    err = max(abs(delaunay.profile_c(1.0, 1.0, v) - math.sqrt(1 - v * v)) for v in x3)
    verdict(2, err < 1e-8, f"max |c(1,1,x3) - sqrt(1-x3^2)| = {err:.2e} over 200 samples")


def test_ac03_appendix_derivatives(verdict):
    rep = rigidity.verify_appendix_derivatives((0.3, 0.5, A0, 0.7, SQRT3_2), 1e-5, 1e-4, 1e-6)
    d1 = max(abs(c.witness["fd"] - c.witness["g"]) for c in rep.checks
             if c.name == "df/dt = g")
    d2 = max(abs(c.witness["fd"] - c.witness["h"]) for c in rep.checks
             if c.name == "d2f/dt2 = h")
    verdict(3, rep.passed, f"max |df/dt - g| = {d1:.2e}, max |d2f/dt2 - h| = {d2:.2e}, "
            f"h(a0) closed form ok = {rep.checks[-1].passed}")


def test_ac04_elliptic_vs_quadrature(verdict):
    rep = rigidity.verify_elliptic_forms(20, 1e-7, 1e-9)
    # margins are bound - value for the bounds 1e-7 and 1e-9
    diff, zero = (bound - c.margin for bound, c in zip((1e-7, 1e-9), rep.checks))
    verdict(4, rep.passed and len(rep.grid) == 400,
            f"20x20 grid, max |elliptic - quadrature| = {diff:.2e}, max |f(a,1)| = {zero:.2e}")


def test_ac05_sign_patterns(verdict):
    cases = {0.3: 2, 0.4: 2, 0.6: 1, 0.8: 1, A0: 3}
    reps = {a: rigidity.verify_lemma_h1(a, 0.005, 50) for a in cases}
    ok = all(r.passed and r.info["case"] == cases[a] for a, r in reps.items())
    margin = min(r.min_margin for r in reps.values())
    verdict(5, ok, f"5 zones x 100 points, min signed margin {margin:.2e}")


def test_ac06_undulary_bound(verdict):
    grid = [round(0.02 + 0.03 * i, 12) for i in range(16)]
    rep = rigidity.verify_lemma_tundu(grid)
    verdict(6, rep.passed and rep.min_margin > 0 and grid[-1] == 0.47,
            f"t in 0.02..0.47 step 0.03, min margin {rep.min_margin:.4f}")


def test_ac07_h_of_t_sign(verdict):
    rep = rigidity.verify_lemma_htwith1((0.4, 0.8, A0), (0.995, 1.005))
    verdict(7, rep.passed and len(rep.checks) == 6, f"min margin {rep.min_margin:.2e}")


def test_ac08_mean_curvature_oracles(verdict):
    errs = []
    for t in (0.3, 0.5, 0.6, SQRT3_2):
        H = mean_curvature_samples(rigidity.cylinder_slice(t))
        errs.append(float(np.max(np.abs(H - 1 / (2 * t)))))
    cyl = max(errs)
    u = np.linspace(1e-3, math.pi - 1e-3, 4001)
    psi = math.pi - u
    sphere = PlanarCurve(u, np.cos(psi), np.sin(psi), psi - math.pi / 2, np.ones(u.size))
    sph = float(np.max(np.abs(mean_curvature_samples(sphere) - 1.0)))
    # curvature recovered from the sampled tangent angle, not the stored kappa; the
    # finite-difference error of that recovery is O(step^2), hence the fine step
    dl = 0.0
    for H, t, x1 in ((1.02, 0.98, 0.6), (0.98, 0.97, 0.5), (1.0, 0.3, 0.6)):
        c = delaunay.delaunay_curve(H, t, x1, max_step=2.5e-4)
        k = curvature_from_samples(c)
        Hs = 0.5 * (k + np.cos(c.theta) / c.x1)
        dl = max(dl, float(np.max(np.abs(Hs - H))))
    # graph form of the quadrature profile c(H, t)
    H, t, h = 1.02, 0.98, 1e-5
    for x in np.linspace(0.1, 0.7, 7):
        cc = delaunay.profile_c(H, t, x)
        dc = delaunay.profile_slope(H, t, x)
        d2c = (delaunay.profile_slope(H, t, x + h) - delaunay.profile_slope(H, t, x - h)) / (2 * h)
        dl = max(dl, abs(float(mean_curvature_graph(cc, dc, d2c)) - H))
    ok = cyl <= 1e-12 and sph < 1e-10 and dl < 1e-6
    verdict(8, ok, f"cylinder {cyl:.1e}, sphere {sph:.1e}, Delaunay {dl:.1e}")


def test_ac09_round_corner(verdict):
    a = 0.5
    ap = 0.5 * (1 + a)
    p = (-math.sqrt(1 - ap * ap), ap)
    d = 0.5 * (ap - a)
    r1 = perturb.unit_circle_from_left_pole(p, d)
    psi = math.atan2(p[1] - 2 * ap, p[0])
    r2 = perturb.circle_piece((0.0, 2 * ap), 1.0, p, -d, psi + 1.5 * math.pi)
    from zonecmc.roundcorner import round_corner
    join = round_corner(r1, r2, p, d, -1)
    checks = {c.name: c for c in join.report.checks}
    c = join.curve
    blend = (c.s >= join.s1) & (c.s <= join.s2 + join.shift)
    Hmax = float(mean_curvature_samples(c)[blend].max())
    lamK = 2 * join.params.lam * join.params.K
    ok = (checks["identity outside [-eps, eps]"].passed
          and checks["d(r(s), p) < delta"].passed
          and Hmax <= 1 + 1e-6
          and lamK < min(join.geometry.alpha, join.geometry.beta)
          and checks["no self intersection"].passed
          and join.report.passed)
    verdict(9, ok, f"lambda = {join.params.lam:.3g}, K = {join.params.K:.3g}, "
            f"max H on blend = {Hmax:.9f}, 2 lam K = {lamK:.3g}")


def test_ac10_builders_complement_classify(verdict):
    flags = {"global_h_minus": "strong_h_minus", "global_h_plus": "strong_h_plus",
             "local_h_plus": "local_h_plus", "local_h_minus": "local_h_minus"}
    rows, ok = [], True
    for a in (0.3, 0.5, A0, 0.7, 0.9):
        cls = rigidity.classify(a)
        marks = ""
        for mode, flag in flags.items():
            try:
                built = perturb.build(mode, a).certificate.passed
            except Exception:
                built = False
            ok &= built != getattr(cls, flag)
            marks += "b" if built else "-"
        rows.append(f"{a:.4f}:{marks}")
    at_a0 = rigidity.classify(A0)
    ok &= at_a0.local_h_plus and not at_a0.local_h_minus
    verdict(10, ok, "built(-hmin,+hpl,+loc,-loc) " + " ".join(rows))


def test_ac11_limit(verdict):
    a = 0.5
    vals = [delaunay.undulary_height_hit(t, a) for t in (1e-2, 1e-3, 1e-4)]
    limit = 1 - math.sqrt(1 - a * a)
    gap = abs(vals[-1] - limit)
    ok = vals[0] > vals[1] > vals[2] and gap < 1e-3
    verdict(11, ok, f"x3(P_t) = {', '.join(f'{v:.6f}' for v in vals)}; "
            f"gap to limit {gap:.2e}")


def test_ac12_determinism(verdict, tmp_path):
    blobs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        proc = subprocess.run([sys.executable, "-m", "zonecmc", "verify", "--lemma", "all",
                               "--report", str(path)], capture_output=True, text=True,
                              check=False)
        blobs.append((proc.returncode, path.read_bytes()))
    ok = blobs[0] == blobs[1] and blobs[0][0] == 0
    verdict(12, ok, f"two runs of the verification suite, {len(blobs[0][1])} bytes each, "
            f"identical = {blobs[0][1] == blobs[1][1]}")
