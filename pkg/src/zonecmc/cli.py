"""Command-line interface.

Subcommands::

    zonecmc a0        [--tol T] [--format text|json]
    zonecmc classify  --a A
    zonecmc profile   --kind delaunay|undulary|tilde|hat [--a A] [--t T] [--H H]
                      [--x1-end X] [--out FILE] [--format csv|svg]
    zonecmc perturb   --mode MODE --a A [--t T] [--tol T] [--out FILE]
                      [--report FILE] [--format csv|svg]
    zonecmc verify    --lemma NAME [--a A] [--grid lo:hi:step] [--tol T]
                      [--samples N] [--report FILE]

Every subcommand also accepts ``--config FILE``, a JSON object whose keys
mirror the long flags (``x1-end`` may be written ``x1_end``) plus an optional
``tolerances`` object with keys ``quadrature``, ``root`` and ``hbound``.
Flags given on the command line override the file.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
Data files never contain timings, so reruns at fixed flags are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import delaunay, perturb, rigidity
from .curve import curve_to_csv, curve_to_svg
from .delaunay import DelaunayParams, ZoneSpec
from .errors import (CrossingNotFound, DomainError, GlueFailure, VerificationFailure,
                     WindowFailure, ZoneCMCError)
from .report import SCHEMA_VERSION, VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("csv", "json", "svg", "text")
LEMMAS = ("h1", "tundu", "htwith1", "slices", "appendix-derivatives", "elliptic-forms", "all")
PROFILE_KINDS = ("delaunay", "undulary", "tilde", "hat")

DEFAULT_GRIDS = {
    "tundu": "0.02:0.48:0.03",
    "slices": "0.55:0.95:0.05",
}


class UsageError(Exception):
    """Bad flags or config contents (exit code 2)."""


@dataclass
class CliConfig:
    """Resolved settings for one invocation."""

    tolerances: dict = field(default_factory=lambda: {
        "quadrature": 1e-7, "root": 1e-12, "hbound": perturb.DEFAULT_TOL})
    samples: int = 20
    out: str | None = None
    report: str | None = None
    format: str | None = None

    def __post_init__(self):
        for key, val in self.tolerances.items():
            if not (isinstance(val, (int, float)) and val > 0):
                raise UsageError(f"tolerance {key!r} must be a positive number")
        if self.samples < 1:
            raise UsageError("samples must be positive")
        if self.format is not None and self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")


def parse_grid(text: str) -> list[float]:
    """Inclusive ``lo:hi:step`` grid; values are rounded to 12 decimals."""
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:step, got {text!r}") from None
    if not step > 0 or hi < lo:
        raise UsageError("grid needs step > 0 and hi >= lo")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def _a_value(text) -> float:
    """Zone parameter; ``a0`` (or ``A0``) stands for the threshold."""
    if isinstance(text, str) and text.lower() == "a0":
        return rigidity.A0
    return float(text)


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default flag values")

    parser = argparse.ArgumentParser(prog="zonecmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("a0", parents=[common], help="print the threshold a0")
    p.add_argument("--tol", type=float)
    p.add_argument("--format", choices=("text", "json"))

    p = sub.add_parser("classify", parents=[common], help="rigidity flags of S_a")
    p.add_argument("--a", type=_a_value)

    p = sub.add_parser("profile", parents=[common], help="sample a Delaunay profile")
    p.add_argument("--kind", choices=PROFILE_KINDS)
    p.add_argument("--a", type=_a_value)
    p.add_argument("--t", type=float)
    p.add_argument("--H", type=float)
    p.add_argument("--x1-end", type=float, dest="x1_end")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "svg"))

    p = sub.add_parser("perturb", parents=[common], help="build a certified perturbation")
    p.add_argument("--mode")
    p.add_argument("--a", type=_a_value)
    p.add_argument("--t", help="t (global modes) or t' (local modes); default auto")
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.add_argument("--report")
    p.add_argument("--format", choices=("csv", "svg"))

    p = sub.add_parser("verify", parents=[common], help="run a numerical verifier")
    p.add_argument("--lemma", choices=LEMMAS)
    p.add_argument("--a", type=_a_value)
    p.add_argument("--grid")
    p.add_argument("--tol", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--report")
    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def resolve(args: argparse.Namespace) -> tuple[argparse.Namespace, CliConfig]:
    """Merge config-file values under the command-line flags."""
    data = _load_config(args.config)
    tolerances = data.pop("tolerances", {})
    if not isinstance(tolerances, dict):
        raise UsageError("'tolerances' must be an object")
    for key, val in data.items():
        if key in ("command", "config"):
            continue
        if not hasattr(args, key):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        if getattr(args, key) is None:
            setattr(args, key, _a_value(val) if key == "a" else val)
    cfg = CliConfig()
    unknown = set(tolerances) - set(cfg.tolerances)
    if unknown:
        raise UsageError(f"unknown tolerance keys {sorted(unknown)}")
    cfg.tolerances.update(tolerances)
    cfg = CliConfig(cfg.tolerances, int(getattr(args, "samples", None) or cfg.samples),
                    getattr(args, "out", None), getattr(args, "report", None),
                    getattr(args, "format", None))
    return args, cfg


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing --{', --'.join(m.replace('_', '-') for m in missing)}")


def _emit(text: str, path, out):
    if path is None:
        out.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- commands -------------------------------------------------------------------

def cmd_a0(args, cfg, out) -> int:
    tol = args.tol if args.tol is not None else cfg.tolerances["root"]
    if not tol > 0:
        raise UsageError("--tol must be positive")
    a0 = rigidity.compute_a0(tol)
    residual = abs(rigidity.g(a0))
    if args.format == "json":
        out.write(_json({"schema": SCHEMA_VERSION, "a0": a0, "tol": tol,
                         "residual": residual}))
    else:
        digits = max(4, min(16, int(math.ceil(-math.log10(tol))) + 1))
        out.write(f"{a0:.{digits}f}\n")
        out.write(f"|g(a0)| = {residual:.3e}\n")
    return EXIT_OK


def cmd_classify(args, cfg, out) -> int:
    _require(args, "a")
    cls = rigidity.classify(args.a)
    out.write(_json({"schema": SCHEMA_VERSION, "a": args.a, "a0": rigidity.A0,
                     "sqrt3_over_2": rigidity.SQRT3_2, **cls.to_dict()}))
    return EXIT_OK


def profile_curve(kind: str, a=None, t=None, H=None, x1_end=None):
    """Sampled curve for ``zonecmc profile``."""
    if kind == "undulary":
        if t is None:
            raise UsageError("undulary needs --t")
        return delaunay.delaunay_curve(1.0, t, x1_end if x1_end is not None else 1.0 - t)
    if kind == "delaunay":
        if t is None or H is None:
            raise UsageError("delaunay needs --H and --t")
        par = DelaunayParams(H, t)
        end = x1_end if x1_end is not None else par.far_end
        if not end > 0:
            raise DomainError("profile reaches the axis; pass --x1-end > 0")
        return delaunay.delaunay_curve(H, t, end)
    if a is None or t is None:
        raise UsageError(f"{kind} needs --a and --t")
    zone = ZoneSpec(a)
    Hval = delaunay.H_of_t(zone, t) if kind == "tilde" else 1.0
    end = x1_end if x1_end is not None else delaunay.profile_c(Hval, t, zone.w3)
    return delaunay.delaunay_curve(Hval, t, end)


def cmd_profile(args, cfg, out) -> int:
    _require(args, "kind")
    curve = profile_curve(args.kind, args.a, args.t, args.H, args.x1_end)
    fmt = cfg.format or ("svg" if (args.out or "").endswith(".svg") else "csv")
    text = curve_to_svg(curve, title=args.kind) if fmt == "svg" else curve_to_csv(curve)
    _emit(text, args.out, out)
    return EXIT_OK


def _perturb_kwargs(mode, t):
    if t is None or t == "auto":
        return {}
    val = float(t)
    key = {"global_h_plus": "t", "local_h_plus": "t_prime", "local_h_minus": "t0_prime"}.get(mode)
    if key is None:
        raise UsageError(f"{mode} takes no --t")
    return {key: val}


def cmd_perturb(args, cfg, out) -> int:
    _require(args, "mode", "a")
    mode = args.mode.replace("-", "_").replace("hminus", "h_minus").replace("hplus", "h_plus")
    if mode not in perturb.MODES:
        raise UsageError(f"unknown mode {args.mode!r}; choose from {', '.join(perturb.MODES)}")
    tol = args.tol if args.tol is not None else cfg.tolerances["hbound"]
    kwargs = _perturb_kwargs(mode, args.t)
    try:
        res = perturb.build(mode, args.a, tol=tol, **kwargs)
    except VerificationFailure as exc:
        if exc.report is not None and args.report:
            _emit(exc.report.to_json(), args.report, out)
        raise
    cert = res.certificate
    cert.info["construction"] = res.construction_log
    cert.info["sup_distance"] = res.sup_distance
    fmt = cfg.format or ("svg" if (args.out or "").endswith(".svg") else "csv")
    if args.out is not None:
        text = curve_to_svg(res.curve, title=mode) if fmt == "svg" else curve_to_csv(res.curve)
        _emit(text, args.out, out)
    if args.report is not None:
        _emit(cert.to_json(), args.report, out)
    else:
        out.write(cert.to_json())
    return EXIT_OK


def _merge(name, reports) -> VerificationReport:
    if len(reports) == 1:
        return reports[0]
    rep = VerificationReport(name, [r.grid for r in reports], reports[0].tolerance,
                             info={"parts": [r.info for r in reports]})
    for r in reports:
        rep.extend(r.checks)
    return rep


def _a_list(args, default):
    if args.grid is not None:
        return parse_grid(args.grid)
    if args.a is not None:
        return [args.a]
    return list(default)


def run_verifier(lemma, args, cfg) -> VerificationReport:
    """Dispatch ``zonecmc verify`` to the matching verifier."""
    if lemma == "h1":
        a_values = _a_list(args, (0.3, 0.4, rigidity.A0, 0.6, 0.8))
        n = args.samples if args.samples is not None else 50
        return _merge("h1", [rigidity.verify_lemma_h1(a, n=n) for a in a_values])
    if lemma == "htwith1":
        return rigidity.verify_lemma_htwith1(_a_list(args, (0.4, rigidity.A0, 0.8)))
    if lemma == "tundu":
        return rigidity.verify_lemma_tundu(parse_grid(args.grid or DEFAULT_GRIDS["tundu"]))
    if lemma == "slices":
        return rigidity.verify_slice_curvatures(parse_grid(args.grid or DEFAULT_GRIDS["slices"]))
    if lemma == "appendix-derivatives":
        return rigidity.verify_appendix_derivatives(_a_list(args, rigidity.APPENDIX_A))
    if lemma == "elliptic-forms":
        tol = args.tol if args.tol is not None else cfg.tolerances["quadrature"]
        return rigidity.verify_elliptic_forms(n=cfg.samples, tol=tol)
    raise UsageError(f"unknown lemma {lemma!r}")


def cmd_verify(args, cfg, out) -> int:
    _require(args, "lemma")
    if args.lemma == "all":
        if args.a is not None or args.grid is not None:
            raise UsageError("--lemma all runs the default grids; drop --a/--grid")
        reports = [run_verifier(name, args, cfg) for name in LEMMAS[:-1]]
        ok = all(r.passed for r in reports)
        text = _json({"schema": SCHEMA_VERSION, "pass": ok,
                      "reports": [r.to_dict() for r in reports]})
        summary = "\n".join(r.summary() for r in reports) + "\n"
    else:
        rep = run_verifier(args.lemma, args, cfg)
        ok = rep.passed
        text = rep.to_json()
        summary = rep.summary() + "\n"
    if args.report is not None:
        _emit(text, args.report, out)
        out.write(summary)
    else:
        out.write(text)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "a0": cmd_a0,
    "classify": cmd_classify,
    "profile": cmd_profile,
    "perturb": cmd_perturb,
    "verify": cmd_verify,
}


def main(argv=None, out=None, err=None) -> int:
    """Entry point; returns the exit code instead of calling ``sys.exit``."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        args, cfg = resolve(args)
        return COMMANDS[args.command](args, cfg, out)
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (VerificationFailure, GlueFailure) as exc:
        err.write(f"verification failed: {exc}\n")
        return EXIT_FAIL
    except (DomainError, WindowFailure, CrossingNotFound, ZoneCMCError) as exc:
        err.write(f"domain error: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"i/o error: {exc}\n")
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
