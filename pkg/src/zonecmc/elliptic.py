"""Incomplete elliptic integrals for moduli that may exceed one.

The zone-height function uses ``k(t) = t / sqrt(2t - 1)``, which is larger
than one for every ``t != 1``.  The classical AGM/Carlson routines assume
``k <= 1``, so ``F`` and ``E`` are evaluated here by adaptive quadrature of
their defining integrals, valid whenever ``k sin(theta) < 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .errors import DomainError, ModulusDomain, SingularModulus

GUARD = 1e-9
QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-13, limit=200)


@dataclass(frozen=True)
class EllipticArgs:
    """Modulus ``k`` and amplitude ``theta`` in ``[0, pi/2]``."""

    k: float
    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-15:
            raise DomainError(f"amplitude {self.theta} outside [0, pi/2]")
        if self.k < 0:
            raise DomainError("modulus must be nonnegative")
        if self.k * math.sin(self.theta) > 1.0 - GUARD:
            raise ModulusDomain(
                f"k sin(theta) = {self.k * math.sin(self.theta):.12g} too close to 1")


def _args(k, theta=None):
    if isinstance(k, EllipticArgs):
        return k
    return EllipticArgs(float(k), float(theta))


def _quad(fun, theta):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(fun, 0.0, theta, **QUAD_OPTS)
    return val


def delta_of(k, theta=None) -> float:
    """``sqrt(1 - k^2 sin^2 theta)``."""
    args = _args(k, theta)
    return math.sqrt(1.0 - (args.k * math.sin(args.theta)) ** 2)


def ellip_F(k, theta=None) -> float:
    """Incomplete integral of the first kind, ``int_0^theta dphi / Delta``."""
    args = _args(k, theta)
    if args.k == 0.0:
        return args.theta
    if args.k == 1.0:
        th = args.theta
        return math.log(1.0 / math.cos(th) + math.tan(th))
    k2 = args.k * args.k
    return _quad(lambda p: 1.0 / math.sqrt(1.0 - k2 * math.sin(p) ** 2), args.theta)


def ellip_E(k, theta=None) -> float:
    """Incomplete integral of the second kind, ``int_0^theta Delta dphi``."""
    args = _args(k, theta)
    if args.k == 0.0:
        return args.theta
    if args.k == 1.0:
        return math.sin(args.theta)
    k2 = args.k * args.k
    return _quad(lambda p: math.sqrt(1.0 - k2 * math.sin(p) ** 2), args.theta)


def ellip_dFdk(k, theta=None) -> float:
    """Derivative of ``F`` with respect to the modulus.

    ``E / (k (1 - k^2)) - F / k - k sin(2 theta) / (2 (1 - k^2) Delta)``,
    singular at ``k = 1``.
    """
    args = _args(k, theta)
    kk, th = args.k, args.theta
    if abs(kk - 1.0) < GUARD:
        raise SingularModulus("dF/dk is singular at k = 1")
    if kk == 0.0:
        return 0.0
    one = 1.0 - kk * kk
    F = ellip_F(args)
    E = ellip_E(args)
    return E / (kk * one) - F / kk - kk * math.sin(2 * th) / (2 * one * delta_of(args))


def ellip_dEdk(k, theta=None) -> float:
    """Derivative of ``E`` with respect to the modulus, ``(E - F) / k``."""
    args = _args(k, theta)
    if args.k == 0.0:
        return 0.0
    return (ellip_E(args) - ellip_F(args)) / args.k


def modulus_of(t: float) -> float:
    """``k(t) = t / sqrt(2t - 1)`` for ``t > 1/2``."""
    if not t > 0.5:
        raise DomainError("modulus_of needs t > 1/2")
    return t / math.sqrt(2.0 * t - 1.0)


def amplitude_of(a: float, t: float) -> float:
    """``theta(a, t) = arccos(a / t)`` for ``0 < a <= t``."""
    if not 0.0 < a <= t:
        raise DomainError("amplitude_of needs 0 < a <= t")
    return math.acos(a / t)


def zone_args(a: float, t: float) -> EllipticArgs:
    """Elliptic arguments ``(k(t), theta(a, t))`` used by the zone-height function.

    Requires ``|t - 1| < a`` so that ``k sin(theta) < 1``.
    """
    if not abs(t - 1.0) < a:
        raise DomainError(f"need |t - 1| < a, got a={a}, t={t}")
    return EllipticArgs(modulus_of(t), amplitude_of(a, t))


def delta_identity(a: float, t: float) -> float:
    """Closed form of ``Delta(k(t), theta(a, t))``: ``sqrt((a^2 - (t-1)^2)/(2t-1))``."""
    return math.sqrt((a * a - (t - 1.0) ** 2) / (2.0 * t - 1.0))
