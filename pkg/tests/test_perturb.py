import math

import numpy as np
import pytest

from zonecmc import perturb as pt
from zonecmc.curve import PlanarCurve, mean_curvature_samples
from zonecmc.errors import CrossingNotFound, DomainError, WindowFailure, ZoneCMCError
from zonecmc.rigidity import A0, classify

GRID = (0.3, 0.4, 0.5, A0, 0.6, 0.7, 0.8, 0.9)
# builder mode -> the rigidity flag whose negation it demonstrates
FLAG = {"global_h_minus": "strong_h_minus", "global_h_plus": "strong_h_plus",
        "local_h_plus": "local_h_plus", "local_h_minus": "local_h_minus"}


@pytest.fixture(scope="module")
def minus_05():
    return pt.build_global_h_minus(0.5)


def _radius(curve):
    return np.hypot(curve.x3, curve.x1)


# -- global H- ---------------------------------------------------------------------------

def test_global_minus_bulges_beyond_the_sphere(minus_05):
    assert minus_05.certificate.passed
    # the reflected major arc of the unit circle peaks at 2 a' + 1
    assert minus_05.curve.x1.max() == pytest.approx(2 * 0.75 + 1, abs=1e-9)
    assert minus_05.construction_log["max_x1"] > 1.0


def test_global_minus_identity_on_caps(minus_05):
    c = minus_05.curve
    cap = c.x1 <= 0.5
    assert np.max(np.abs(_radius(c)[cap] - 1.0)) < 1e-10


def test_global_minus_mean_curvature_bounded(minus_05):
    H = mean_curvature_samples(minus_05.curve)
    assert H.max() <= 1.0 + 1e-6
    # the mirrored arc sits strictly below H = 1 away from the corner
    top = minus_05.curve.x1 > 1.2
    assert H[top].max() < 1.0


def test_profile_is_symmetric_and_closed_on_the_axis(minus_05):
    c = minus_05.curve
    assert np.max(np.abs(c.x3 + c.x3[::-1])) < 1e-12
    assert c.x1[0] == pytest.approx(0.0, abs=1e-5) and c.x1[-1] == pytest.approx(0.0, abs=1e-5)
    assert c.x3[0] < 0 < c.x3[-1]


def test_construction_log(minus_05):
    log = minus_05.construction_log
    assert log["a_prime"] == 0.75
    assert log["delta"] == pytest.approx(0.125)
    assert {"lambda", "K", "epsilon"} <= set(log["corner"])


# -- global H+ -----------------------------------------------------------------------------

def test_global_plus_dips_inside_the_ball():
    res = pt.build_global_h_plus(0.5, t=0.25)
    assert res.certificate.passed
    assert _radius(res.curve).min() < 1.0
    assert mean_curvature_samples(res.curve).min() >= 1.0 - 1e-6


def test_global_plus_near_threshold_uses_small_t():
    res = pt.build_global_h_plus(0.86)
    assert res.certificate.passed
    assert res.construction_log["t"] < 0.01


def test_global_plus_impossible_above_threshold():
    with pytest.raises(WindowFailure):
        pt.build_global_h_plus(0.9)


def test_global_plus_margin():
    assert pt.global_plus_margin(0.5) == 0.02
    assert 0 < pt.global_plus_margin(0.86) < 0.02
    assert pt.global_plus_margin(0.9) == 0.0


# -- local modes -----------------------------------------------------------------------------

def test_local_plus_below_threshold():
    res = pt.build_local_h_plus(0.4, 0.995)
    assert res.certificate.passed
    assert res.sup_distance < 0.01
    assert mean_curvature_samples(res.curve).min() >= 1.0 - 1e-6


def test_local_plus_crossing_needs_positive_f():
    from zonecmc.rigidity import f
    assert f(0.4, 0.995) > 0
    x3, x1 = pt.find_crossing(0.4, 0.995)
    assert x1 > 0.4 and x3 * x3 + x1 * x1 == pytest.approx(1.0, abs=1e-14)


def test_local_plus_above_threshold_has_no_crossing():
    with pytest.raises(CrossingNotFound):
        pt.build_local_h_plus(0.7, 0.995)


@pytest.mark.parametrize("a", [A0, 0.4])
def test_local_minus_up_to_threshold(a):
    res = pt.build_local_h_minus(a, 1.005)
    assert res.certificate.passed
    assert mean_curvature_samples(res.curve).max() <= 1.0 + 1e-6


def test_local_minus_above_threshold_has_no_crossing():
    with pytest.raises(CrossingNotFound):
        pt.build_local_h_minus(0.7, 1.005)


def test_local_side_of_one_is_enforced():
    with pytest.raises(DomainError):
        pt.build_local_h_plus(0.4, 1.005)
    with pytest.raises(DomainError):
        pt.build_local_h_minus(0.4, 0.995)


@pytest.mark.parametrize("mode,sign", [("local_h_plus", -1), ("local_h_minus", 1)])
def test_locality_scaling(mode, sign):
    key = "t_prime" if mode == "local_h_plus" else "t0_prime"
    dists = [pt.build(mode, 0.4, **{key: 1.0 + sign * d}).sup_distance
             for d in (0.01, 0.008, 0.006, 0.004, 0.002)]
    assert np.all(np.diff(dists) < 0)


# -- mode / threshold consistency --------------------------------------------------------------

@pytest.mark.parametrize("a", GRID, ids=[f"a={a:.4f}" for a in GRID])
@pytest.mark.parametrize("mode", pt.MODES)
def test_builder_success_complements_classify(mode, a):
    rigid = getattr(classify(a), FLAG[mode])
    try:
        res = pt.build(mode, a)
    except ZoneCMCError:
        assert rigid, f"{mode} failed at a = {a} although the zone is not rigid"
        return
    assert not rigid, f"{mode} succeeded at a = {a} although the zone is rigid"
    assert res.certificate.passed
    assert pt.certify(res, 1e-6).passed


def test_build_accepts_cli_style_mode_names():
    res = pt.build("global-hminus", 0.7)
    assert res.mode == "global_h_minus"
    with pytest.raises(DomainError):
        pt.build("sideways", 0.5)


# -- certificate -------------------------------------------------------------------------------

def test_certificate_sections(minus_05):
    names = [c.name for c in minus_05.certificate.checks]
    for want in ("H <= 1", "no self intersection", "caps on the unit circle",
                 "mirror symmetry"):
        assert want in names


def test_corrupted_curve_fails_with_witness(minus_05):
    c = minus_05.curve
    x1 = np.array(c.x1)
    x1[40] += 1e-2
    bad = pt.PerturbationResult(PlanarCurve(c.s, c.x3, x1, c.theta, c.kappa),
                                minus_05.mode, 0.5)
    rep = pt.certify(bad)
    assert not rep.passed
    failed = {f.name for f in rep.failures()}
    assert "caps on the unit circle" in failed
    assert rep.witness["check"] in failed


@pytest.mark.parametrize("tol", [1e-4, 1e-5, 1e-6, 1e-7, 1e-8])
def test_tolerance_sweep(minus_05, tol):
    rep = pt.certify(minus_05, tol)
    assert rep.passed
    assert rep.max_violation < 1e-12
