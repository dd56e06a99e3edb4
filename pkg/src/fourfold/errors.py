"""Exception hierarchy.

Every error a caller can provoke with bad input derives from
:class:`FourfoldError`; the command line maps those to exit status 2.
"""

from __future__ import annotations


class FourfoldError(Exception):
    """Base class for domain errors."""


class NotSymmetric(FourfoldError):
    pass


class NonUnimodular(FourfoldError):
    pass


class DimensionMismatch(FourfoldError):
    pass


class NotCharacteristic(FourfoldError):
    pass


class InvariantViolation(FourfoldError):
    def __init__(self, name: str, detail: str):
        super().__init__(f"{name}: {detail}")
        self.name = name
        self.detail = detail


class ManifestParseError(FourfoldError):
    def __init__(self, line: int, detail: str):
        super().__init__(f"manifest line {line}: {detail}")
        self.line = line
        self.detail = detail


class DuplicateName(FourfoldError):
    pass


class UnknownManifold(FourfoldError):
    pass


class ExpressionSyntaxError(FourfoldError):
    """Parse failure at a character offset, with the set of tokens that would have been accepted."""

    def __init__(self, position: int, expected: frozenset[str], text: str = ""):
        exp = ", ".join(sorted(expected))
        super().__init__(f"syntax error at position {position}: expected one of {{{exp}}}")
        self.position = position
        self.expected = expected
        self.text = text


class ZeroMultiplicity(FourfoldError):
    pass


class NonIntegralDimension(FourfoldError):
    pass


class InternalInconsistency(Exception):
    """Two formulas that must agree on valid data disagree. Not a user error."""


class MissingData(FourfoldError):
    pass


class DataInconsistent(FourfoldError):
    pass


class PreconditionViolation(FourfoldError):
    pass


class SplitMismatch(FourfoldError):
    pass


class SingularMetric(FourfoldError):
    pass


class NotSelfDual(FourfoldError):
    pass


class ZeroSpinor(FourfoldError):
    pass


class NotCompatible(FourfoldError):
    pass


class NotOnQuadric(FourfoldError):
    pass


class NotEigen(FourfoldError):
    pass


class PointOnQuadric(FourfoldError):
    pass


class DegeneratePencil(FourfoldError):
    pass


class NotOnConic(FourfoldError):
    pass


class TangentsCoincide(FourfoldError):
    pass


class ToleranceExceeded(Exception):
    def __init__(self, identity: str, residual: float, tolerance: float):
        super().__init__(f"{identity}: residual {residual:.3e} exceeds {tolerance:.0e}")
        self.identity = identity
        self.residual = residual
        self.tolerance = tolerance
