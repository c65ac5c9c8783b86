"""Exception hierarchy.

Every error raised on purpose by the package derives from ``ZoneCMCError`` so
callers (and the CLI) can tell domain failures apart from programming errors.
"""


class ZoneCMCError(Exception):
    """Base class for all package errors."""


class DomainError(ZoneCMCError, ValueError):
    """An argument lies outside the domain of the operation."""


# curve
class DomainExit(ZoneCMCError):
    """Curve integration reached the rotation axis (x1 <= 0)."""


class AxisContact(DomainError):
    """Distance to the rotation axis is below the positivity tolerance."""


# elliptic
class ModulusDomain(DomainError):
    """k * sin(theta) is not safely below 1."""


class SingularModulus(DomainError):
    """The parameter derivative of F is singular at k = 1."""


# delaunay
class RadicandNegative(DomainError):
    """The radicand of D(H, t, x) is negative."""


class OutOfWindow(DomainError):
    """A Delaunay evaluation left the interval where the profile is a graph."""


class NoBracket(ZoneCMCError):
    """A monotone bracket could not be established for a root finder."""


class BeyondBulge(DomainError):
    """Requested abscissa lies past the half period of an undulary."""


class NoIntersection(ZoneCMCError):
    """An undulary never meets the unit circle within its half period."""


# roundcorner
class ConstraintViolation(ZoneCMCError):
    """A gluing parameter violates one of the corner-rounding inequalities."""


class NoMatch(ZoneCMCError):
    """The two circle-center curves could not be matched."""


class VerificationFailure(ZoneCMCError):
    """A constructed object failed one of its a-posteriori checks.

    ``report`` carries the full ``VerificationReport``; ``witness`` and
    ``margin`` point at the worst offender.
    """

    def __init__(self, message, report=None, witness=None, margin=None):
        super().__init__(message)
        self.report = report
        self.witness = witness
        self.margin = margin


class SearchExhausted(ZoneCMCError):
    """Automatic parameter search hit its iteration cap."""


# perturb
class WindowFailure(ZoneCMCError):
    """No admissible undulary parameter t was found."""


class CrossingNotFound(ZoneCMCError):
    """The Delaunay profile does not cross the unit circle inside the zone."""


class GlueFailure(ZoneCMCError):
    """Corner rounding failed while building a perturbation."""

    def __init__(self, message, ledger=None):
        super().__init__(message)
        self.ledger = ledger
