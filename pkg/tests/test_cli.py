import io
import json
import subprocess
import sys

import pytest

from zonecmc import cli
from zonecmc.rigidity import A0


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# -- a0 ------------------------------------------------------------------------------------

def test_a0_high_precision():
    code, text, _ = run("a0", "--tol", "1e-10")
    assert code == 0
    value, residual = text.splitlines()
    assert value.startswith("0.5524")
    assert len(value.split(".")[1]) >= 10
    assert float(residual.split("=")[1]) < 1e-10


def test_a0_low_tolerance_agrees_to_two_digits():
    _, hi, _ = run("a0", "--tol", "1e-10")
    _, lo, _ = run("a0", "--tol", "1e-2")
    assert abs(float(hi.split()[0]) - float(lo.split()[0])) < 1e-2


def test_a0_json():
    code, text, _ = run("a0", "--format", "json")
    data = json.loads(text)
    assert code == 0 and data["schema"] == 1
    assert data["a0"] == pytest.approx(A0, abs=1e-12)


# -- classify ---------------------------------------------------------------------------------

def test_classify_above_both_thresholds():
    code, text, _ = run("classify", "--a", "0.9")
    data = json.loads(text)
    assert code == 0
    assert data["strong_h_plus"] and data["local_h_plus"] and data["local_h_minus"]
    assert data["strong_h_minus"] is False


def test_classify_at_threshold_keyword():
    data = json.loads(run("classify", "--a", "a0")[1])
    assert data["local_h_plus"] and not data["local_h_minus"]


def test_classify_domain_error_exit_code():
    code, _, err = run("classify", "--a", "1.5")
    assert code == 2 and "domain error" in err


# -- verify ------------------------------------------------------------------------------------

def test_verify_tundu_grid():
    code, text, _ = run("verify", "--lemma", "tundu", "--grid", "0.05:0.45:0.05")
    data = json.loads(text)
    assert code == 0 and data["pass"]
    assert data["grid"] == [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]


@pytest.mark.parametrize("lemma", ["h1", "htwith1", "slices", "appendix-derivatives"])
def test_verify_default_grids_pass(lemma):
    code, text, _ = run("verify", "--lemma", lemma)
    assert code == 0 and json.loads(text)["pass"]


def test_verify_failure_exit_code():
    code, text, _ = run("verify", "--lemma", "elliptic-forms", "--samples", "3",
                        "--tol", "1e-30")
    assert code == 1
    assert json.loads(text)["pass"] is False


def test_verify_all_writes_report(tmp_path):
    path = tmp_path / "all.json"
    code, summary, _ = run("verify", "--lemma", "all", "--report", str(path))
    data = json.loads(path.read_text())
    assert code == 0 and data["pass"]
    assert [r["lemma"] for r in data["reports"]] == list(cli.LEMMAS[:-1])
    assert len(summary.splitlines()) == 6


# -- perturb and profile --------------------------------------------------------------------

def test_perturb_writes_curve_and_report(tmp_path):
    out, rep = tmp_path / "p.csv", tmp_path / "r.json"
    code, _, _ = run("perturb", "--mode", "global-hminus", "--a", "0.5", "--out", str(out),
                     "--report", str(rep))
    assert code == 0
    assert out.read_text().splitlines()[0] == "s,x3,x1,theta,kappa"
    data = json.loads(rep.read_text())
    assert data["pass"] and data["info"]["construction"]["a_prime"] == 0.75


def test_perturb_impossible_mode_exit_code():
    code, _, err = run("perturb", "--mode", "global-hplus", "--a", "0.9")
    assert code == 2 and "WindowFailure" in err


def test_perturb_unknown_mode_and_missing_flags():
    assert run("perturb", "--mode", "sideways", "--a", "0.5")[0] == 2
    assert run("perturb", "--a", "0.5")[0] == 2
    assert run("perturb", "--mode", "global-hminus", "--a", "0.5", "--t", "0.1")[0] == 2


def test_profile_csv_and_svg(tmp_path):
    code, text, _ = run("profile", "--kind", "undulary", "--t", "0.25")
    assert code == 0 and text.startswith("s,x3,x1,theta,kappa")
    svg = tmp_path / "u.svg"
    assert run("profile", "--kind", "tilde", "--a", "0.6", "--t", "0.99", "--out",
               str(svg))[0] == 0
    assert "<svg" in svg.read_text()


def test_profile_missing_parameters():
    assert run("profile", "--kind", "delaunay", "--t", "0.9")[0] == 2


# -- usage, config and determinism -----------------------------------------------------------

def test_bad_lemma_is_usage_error(capsys):
    assert run("verify", "--lemma", "nonsense")[0] == 2


def test_bad_grid_is_usage_error():
    assert run("verify", "--lemma", "tundu", "--grid", "0.1:0.05:0.01")[0] == 2
    assert run("verify", "--lemma", "tundu", "--grid", "abc")[0] == 2


def test_parse_grid_inclusive():
    assert cli.parse_grid("0.55:0.95:0.05")[-1] == 0.95
    assert len(cli.parse_grid("0.02:0.48:0.03")) == 16


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"a": 0.9}))
    data = json.loads(run("classify", "--config", str(cfg))[1])
    assert data["a"] == 0.9
    data = json.loads(run("classify", "--config", str(cfg), "--a", "0.5")[1])
    assert data["a"] == 0.5


def test_config_tolerances(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"quadrature": 1e-30}, "samples": 3}))
    assert run("verify", "--lemma", "elliptic-forms", "--config", str(cfg))[0] == 1
    cfg.write_text(json.dumps({"tolerances": {"quadrature": -1}}))
    assert run("a0", "--config", str(cfg))[0] == 2
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert run("a0", "--config", str(cfg))[0] == 2
    assert run("a0", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_reruns_are_byte_identical(tmp_path):
    paths = []
    for k in range(2):
        d = tmp_path / str(k)
        d.mkdir()
        run("verify", "--lemma", "all", "--report", str(d / "all.json"))
        run("perturb", "--mode", "local-hplus", "--a", "0.4", "--t", "0.995",
            "--out", str(d / "p.csv"), "--report", str(d / "r.json"))
        paths.append(d)
    for name in ("all.json", "p.csv", "r.json"):
        assert (paths[0] / name).read_bytes() == (paths[1] / name).read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zonecmc", "classify", "--a", "0.5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["local_h_plus"] is False
