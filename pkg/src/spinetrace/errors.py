"""Exception and warning hierarchy.

Two broad failure categories exist so that callers (notably the CLI) can
map them onto distinct exit codes: validation failures are bad inputs or
parameters, numerical failures are runtime breakdowns of an otherwise
well-posed computation.
"""


class SpineTraceError(Exception):
    """Base class for all library errors."""


class ValidationError(SpineTraceError):
    """Bad input data or parameters."""


class NumericalError(SpineTraceError):
    """A numerical procedure failed to produce a usable result."""


# --- validation ------------------------------------------------------------

class ConstantImageError(ValidationError):
    """Image has a single grey value; cannot be rescaled."""


class EmptyMaskError(ValidationError):
    """Mask contains no true pixel."""


class FullMaskError(ValidationError):
    """Mask covers the whole grid; it has no exterior."""


class BadParameterError(ValidationError):
    """Parameter outside its admissible range."""


class SourceOutOfBoundsError(ValidationError):
    """Marching source lies outside the grid."""


class EmptyBoundaryError(ValidationError):
    """Boundary point list is empty."""


class HeadInsideShaftError(ValidationError):
    """Head centroid does not lie strictly outside the shaft mask."""


class GeometryError(ValidationError):
    """Synthetic scene geometry is inconsistent."""


class EmptySetError(ValidationError):
    """Point set is empty."""


# --- numerical -------------------------------------------------------------

class NoConvergenceError(NumericalError):
    """Descent exceeded its step budget (spurious critical point)."""


class ZeroGradientError(NumericalError):
    """Gradient vanished away from the source."""


class AllTracesFailedError(NumericalError):
    """Every candidate backtrace failed."""


class NoCrossingError(NumericalError):
    """A requested curve-parameter value is never crossed by the path."""


class NoContourError(NumericalError):
    """Requested iso-level has an empty contour."""


class AllCandidatesFailedError(NumericalError):
    """No candidate could be resampled at some grid parameter."""


class FitFailureError(NumericalError):
    """Curve fit is impossible on the given data."""


# --- warnings --------------------------------------------------------------

class SpineTraceWarning(UserWarning):
    """Base class for library warnings."""


class ShortSampleWarning(SpineTraceWarning):
    """Sampler exhausted acceptable points before reaching the target count."""


class DroppedTraceWarning(SpineTraceWarning):
    """A candidate backtrace failed and was dropped."""


class ExtraComponentsWarning(SpineTraceWarning):
    """Mask has several connected components; only the largest is used."""


class SplineFallbackWarning(SpineTraceWarning):
    """Spline fit was singular; fell back to the polyline."""
