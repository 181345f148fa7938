"""Exception hierarchy shared by the numerical engines and the CLI."""


class RegulinkError(Exception):
    """Base class for all package errors."""


class DomainError(RegulinkError, ValueError):
    """Input does not lie on the manifold / group it claims to."""


class EvaluationError(RegulinkError):
    """A map produced non-finite values or inconsistent differentials."""


class ProjectionError(RegulinkError):
    """Stereographic projection requested too close to the pole."""


class NotRegularError(DomainError):
    """The requested value is a critical value of the map."""


class TracingError(RegulinkError):
    """Corrector divergence while following a preimage curve."""

    def __init__(self, message, last_point=None):
        super().__init__(message)
        self.last_point = last_point


class NonClosureError(TracingError):
    """The traced curve did not close within the step budget."""


class ProximityError(RegulinkError):
    """Two loops are too close for a reliable linking computation."""


class InconclusiveError(RegulinkError):
    """An integer estimate failed its residual or standard-error gate."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class OverlapError(DomainError):
    """Chart change requested outside the chart overlap."""


class DegenerateFrameError(RegulinkError):
    """A frame field lost rank at some point."""

    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points
