"""Rigidity thresholds and explicit perturbations for equatorial zones of the unit sphere."""

__version__ = "0.1.0"
