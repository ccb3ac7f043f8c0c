"""Exception types raised across the package.

Two families matter to callers: :class:`ValidationError` (bad input, the CLI
maps it to exit code 2) and :class:`CapExceeded` (a configured size limit was
hit, exit code 3). Everything else is a plain computational failure.
"""


class QsdError(Exception):
    """Base class for all errors raised by qsdensity."""


class ValidationError(QsdError, ValueError):
    """Input failed a precondition check."""


class CapExceeded(QsdError):
    """A field, enumeration or section-space size exceeds its configured cap."""


# ff
class NotPrime(ValidationError):
    pass


class NotASubfield(ValidationError):
    pass


# toric
class TorusFactor(ValidationError):
    pass


class IllFormedWeights(ValidationError):
    pass


class InvalidFan(ValidationError):
    pass


class UnboundedPiece(ValidationError):
    pass


class EmptyPiece(ValidationError):
    pass


# points
class NonIntegralCount(QsdError):
    pass


class UnsupportedTorsion(ValidationError):
    pass


# quasismooth
class NotOnY(ValidationError):
    pass


class AmbientNotQuasismoothHere(QsdError):
    pass


class NoStabilization(QsdError):
    pass


class FiberDegreeSearchFailed(QsdError):
    pass


# density
class DivergentRegion(ValidationError):
    pass


class ZeroNu(ValidationError):
    pass


class NotSmooth(ValidationError):
    pass
