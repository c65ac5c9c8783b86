"""Structured pass/fail records shared by the verifiers and builders."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1


def _plain(value):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if hasattr(value, "tolist"):
        return _plain(value.tolist())
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


@dataclass
class Check:
    """One named inequality or residual test.

    ``violation`` is positive when the check fails and is the amount by which
    the quantity overshoots its bound; ``margin`` is the signed slack
    (positive means satisfied).
    """

    name: str
    passed: bool
    margin: float
    tolerance: float = 0.0
    witness: Any = None

    @property
    def violation(self) -> float:
        return max(0.0, -self.margin)

    def to_dict(self) -> dict:
        return _plain({
            "name": self.name,
            "pass": bool(self.passed),
            "margin": float(self.margin),
            "tolerance": float(self.tolerance),
            "witness": self.witness,
        })


def check_upper(name, value, bound, tolerance=0.0, witness=None) -> Check:
    """``value <= bound + tolerance``."""
    margin = float(bound) - float(value)
    return Check(name, margin >= -tolerance, margin, tolerance, witness)


def check_lower(name, value, bound, tolerance=0.0, witness=None) -> Check:
    """``value >= bound - tolerance``."""
    margin = float(value) - float(bound)
    return Check(name, margin >= -tolerance, margin, tolerance, witness)


@dataclass
class VerificationReport:
    """Outcome of a verifier: grid, tolerance, verdict and the worst witness.

    ``elapsed`` is wall-clock seconds; it is kept out of ``to_dict`` so that
    serialized reports are byte-identical across reruns.
    """

    lemma: str
    grid: list
    tolerance: float
    checks: list[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_violation(self) -> float:
        return max((c.violation for c in self.checks), default=0.0)

    @property
    def min_margin(self) -> float:
        return min((c.margin for c in self.checks), default=math.inf)

    @property
    def witness(self):
        failing = [c for c in self.checks if not c.passed]
        pool = failing or self.checks
        if not pool:
            return None
        worst = min(pool, key=lambda c: c.margin)
        return {"check": worst.name, "margin": worst.margin, "at": worst.witness}

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def extend(self, checks):
        self.checks.extend(checks)
        return self

    def to_dict(self) -> dict:
        return _plain({
            "schema": SCHEMA_VERSION,
            "lemma": self.lemma,
            "grid": self.grid,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "max_violation": self.max_violation,
            "witness": self.witness,
            "info": self.info,
            "checks": [c.to_dict() for c in self.checks],
        })

    def to_json(self, indent=2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False) + "\n"

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.lemma}: {status} ({len(self.checks)} checks, "
                f"max violation {self.max_violation:.3g}, "
                f"min margin {self.min_margin:.3g})")
