"""spinetrace: consensus geodesic tracing of dim tubular connections.

Reconstructs the centerline of a poorly illuminated neck joining a
detached blob to a tubular structure in a 2D grayscale image, by taking
the pointwise intrinsic median over a stochastically sampled family of
minimal paths.
"""

from .errors import (
    AllCandidatesFailedError,
    AllTracesFailedError,
    BadParameterError,
    ConstantImageError,
    DroppedTraceWarning,
    EmptyBoundaryError,
    EmptyMaskError,
    EmptySetError,
    ExtraComponentsWarning,
    FitFailureError,
    FullMaskError,
    GeometryError,
    HeadInsideShaftError,
    NoContourError,
    NoConvergenceError,
    NoCrossingError,
    NumericalError,
    ShortSampleWarning,
    SourceOutOfBoundsError,
    SpineTraceError,
    SpineTraceWarning,
    SplineFallbackWarning,
    ValidationError,
    ZeroGradientError,
)
from .raster import (
    BinaryMask,
    Point,
    ScalarField,
    bilinear_sample,
    centroid,
    densify_polyline,
    extract_boundary,
    normalize_image,
    signed_distance,
)
from .eikonal import ArrivalTimeField, PotentialField, build_potential, fast_march
from .geodesic import CandidatePathSet, GeodesicPath, backtrack, trace_candidates
from .sampler import WeightedBoundary, nearest_terminal, sample_terminals, weigh_boundary
from .pathspace import (
    Contour,
    SpineReconstruction,
    estimate_path,
    intrinsic_median,
    iso_contours,
    parameterize,
    parameterize_candidates,
    resample,
    spline_smooth,
)
from .metrics import PointSet2D, SweepRow, mae, mu_sweep
from .phantom import Disc, PhantomConfig, PhantomScene, generate, standard_config
from .pipeline import ReconstructionResult, RunConfig, run_reconstruction

__version__ = "0.1.0"
