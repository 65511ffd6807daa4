"""Terminal selection on the shaft boundary.

Boundary points are weighted by how early the front reaches them, then a
stochastic without-replacement procedure accumulates candidate terminals.
The deterministic nearest-point rule is kept as the baseline strategy.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BadParameterError, EmptyBoundaryError, ShortSampleWarning
from .eikonal import ArrivalTimeField
from .raster import Point, bilinear_sample


@dataclass(frozen=True)
class WeightedBoundary:
    """Boundary points with their arrival times and sampling weights."""

    points: np.ndarray   # (M, 2) float64
    arrivals: np.ndarray  # (M,)
    weights: np.ndarray   # (M,) in [0, 1]
    t_minus: float
    t_plus: float


def weigh_boundary(boundary: np.ndarray, arrival: ArrivalTimeField) -> WeightedBoundary:
    """Attach arrival times and affine weights to boundary points.

    Arrival times are read from the field by bilinear interpolation. The
    weight of a point with arrival t is 1 - (t - t_min) / (t_max - t_min),
    so the earliest point carries weight 1 and the latest weight 0; if all
    arrivals coincide every weight is 1.
    """
    pts = np.asarray(boundary, dtype=np.float64)
    if pts.size == 0:
        raise EmptyBoundaryError("boundary is empty")
    ts = bilinear_sample(arrival.field.values, pts[:, 0], pts[:, 1])
    t_minus = float(ts.min())
    t_plus = float(ts.max())
    if t_plus > t_minus:
        ws = 1.0 - (ts - t_minus) / (t_plus - t_minus)
    else:
        ws = np.ones_like(ts)
    return WeightedBoundary(pts, ts, ws, t_minus, t_plus)


def sample_terminals(wb: WeightedBoundary, n: int, seed: int) -> np.ndarray:
    """Stochastically accumulate ``n`` distinct terminals, seeded.

    Repeatedly draws a uniformly random not-yet-accepted index and accepts
    it with probability equal to its weight, until ``n`` points are
    accumulated. Zero-weight points can never be accepted and are excluded
    from the draw pool; when fewer than ``n`` acceptable points exist the
    accepted subset is returned with a warning instead of looping forever.

    Deterministic for a fixed (boundary, n, seed): draws come from a
    seeded PCG64 generator. Returns an (n, 2) array in acceptance order.
    """
    if n < 1:
        raise BadParameterError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    pool = [int(i) for i in np.nonzero(wb.weights > 0.0)[0]]
    weights = wb.weights
    accepted: list[int] = []
    budget = max(10_000, 200 * len(weights))  # stall guard; never hit in practice
    while pool and len(accepted) < n and budget > 0:
        budget -= 1
        k = int(rng.integers(len(pool)))
        idx = pool[k]
        if rng.random() < weights[idx]:
            accepted.append(idx)
            pool.pop(k)
    if len(accepted) < n:
        warnings.warn(
            f"only {len(accepted)} of {n} requested terminals are acceptable",
            ShortSampleWarning, stacklevel=2)
    return wb.points[accepted].copy()


def nearest_terminal(wb: WeightedBoundary) -> Point:
    """The boundary point with minimal arrival time (ties: lowest index)."""
    if wb.points.size == 0:
        raise EmptyBoundaryError("boundary is empty")
    i = int(np.argmin(wb.arrivals))
    return Point(float(wb.points[i, 0]), float(wb.points[i, 1]))
