"""End-to-end reconstruction: the full stage composition in memory.

Shared by the command-line interface and the parameter sweep so that both
run byte-for-byte the same pipeline.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import asdict, dataclass

import numpy as np

from .errors import BadParameterError, HeadInsideShaftError, SpineTraceError, ValidationError
from .eikonal import ArrivalTimeField, build_potential, fast_march
from .geodesic import CandidatePathSet, trace_candidates
from .pathspace import SpineReconstruction, estimate_path, parameterize_candidates, spline_smooth
from .raster import BinaryMask, Point, ScalarField, centroid, extract_boundary, normalize_image, signed_distance
from .sampler import WeightedBoundary, nearest_terminal, sample_terminals, weigh_boundary


@dataclass(frozen=True)
class RunConfig:
    """Pipeline parameters with their defaults."""

    mu: float = 7.0
    w: float = 0.01
    n_terminals: int = 15
    n_lambda: int = 25
    spline_samples: int = 100
    seed: int = 0
    method: str = "proposed"
    step: float = 0.5
    tol: float = 1.0

    def __post_init__(self):
        if self.method not in ("proposed", "baseline"):
            raise BadParameterError(f"method must be 'proposed' or 'baseline', got {self.method!r}")


@dataclass(frozen=True)
class ReconstructionResult:
    """Reconstruction plus the intermediates needed for export and overlays."""

    reconstruction: SpineReconstruction
    candidates: CandidatePathSet
    boundary: np.ndarray
    weighted_boundary: WeightedBoundary
    terminals: np.ndarray
    arrival: ArrivalTimeField
    phi: ScalarField
    head_centroid: Point


@contextmanager
def _stage(name: str):
    try:
        yield
    except SpineTraceError as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise


def run_reconstruction(image: ScalarField, head_mask: BinaryMask,
                       shaft_mask: BinaryMask, config: RunConfig = RunConfig()
                       ) -> ReconstructionResult:
    """Run the full pipeline on one scene.

    normalize -> signed distance -> centroid -> potential -> fast march ->
    boundary weights -> terminal selection -> backtraces -> level-set
    parameterization -> pointwise intrinsic median -> spline smoothing.

    Library errors raised from a stage carry a ``stage`` attribute naming it.
    """
    with _stage("validate"):
        for name, mask in (("head mask", head_mask), ("shaft mask", shaft_mask)):
            if (mask.height, mask.width) != (image.height, image.width):
                raise ValidationError(
                    f"{name} is {mask.width}x{mask.height}, image is "
                    f"{image.width}x{image.height}")
            if mask.count == 0:
                raise ValidationError(f"{name} is empty")

    with _stage("normalize"):
        norm = normalize_image(image)
    with _stage("signed_distance"):
        phi = signed_distance(shaft_mask)
    with _stage("centroid"):
        p_h = centroid(head_mask)
        if phi.sample(p_h.x, p_h.y) <= 0.0:
            raise HeadInsideShaftError(
                f"head centroid ({p_h.x:.2f}, {p_h.y:.2f}) is not outside the shaft")
    with _stage("build_potential"):
        pot = build_potential(norm, mu=config.mu, w=config.w)
    with _stage("fast_march"):
        arrival = fast_march(pot, p_h)
    with _stage("extract_boundary"):
        boundary = extract_boundary(shaft_mask)
    with _stage("weigh_boundary"):
        wb = weigh_boundary(boundary, arrival)
    with _stage("select_terminals"):
        if config.method == "baseline":
            terminals = np.asarray([list(nearest_terminal(wb))])
        else:
            terminals = sample_terminals(wb, config.n_terminals, config.seed)
    with _stage("trace_candidates"):
        cands = trace_candidates(arrival, terminals, step=config.step, tol=config.tol)
    with _stage("parameterize"):
        cands = parameterize_candidates(cands, phi)
    with _stage("estimate_path"):
        recon = estimate_path(cands, phi, config.n_lambda)
    with _stage("spline_smooth"):
        recon = spline_smooth(recon, config.spline_samples)

    params = dict(asdict(config))
    params.update(recon.params)
    params["head_centroid"] = [p_h.x, p_h.y]
    params["source_pixel"] = [arrival.source.x, arrival.source.y]
    params["source_offset"] = [p_h.x - arrival.source.x, p_h.y - arrival.source.y]
    recon = SpineReconstruction(recon.lambda_grid, recon.median_points,
                                recon.spline_points, params)
    return ReconstructionResult(
        reconstruction=recon, candidates=cands, boundary=boundary,
        weighted_boundary=wb, terminals=terminals, arrival=arrival,
        phi=phi, head_centroid=p_h)
