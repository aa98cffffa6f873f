"""Exception types shared across the package."""


class SscmissError(Exception):
    """Base class for all package-specific errors."""


class PatternLengthMismatch(SscmissError):
    """An observation pattern's length differs from the ambient dimension."""


class UnequalMaskCount(SscmissError):
    """Observation patterns do not all hide the same number of coordinates."""


class FullMask(SscmissError):
    """A pattern hides every coordinate, leaving nothing observed."""


class DegenerateSubspace(SscmissError):
    """A subspace collapses to {0} under the requested projection."""


class DegeneratePoint(SscmissError):
    """A point's observed part is (numerically) zero."""


class InvalidDensity(SscmissError):
    """The sampling density does not yield an integral number of points."""


class InfeasibleDual(SscmissError):
    """A recovered dual vector violates the constraint ||Y^T v||_inf <= 1."""


class LonelyAnchor(SscmissError):
    """The anchor has no same-cluster companions to form a reduced problem."""


class MissingBasis(SscmissError):
    """No subspace basis is available (or estimable) for a requested cluster."""


class DimensionTooHigh(SscmissError):
    """The requested exact method only supports a lower span dimension."""


class VertexBlowup(SscmissError):
    """Vertex enumeration would exceed the configured combination budget."""
