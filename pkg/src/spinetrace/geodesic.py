"""Minimal-path extraction by gradient descent on the arrival-time field.

A geodesic between the seed and a terminal is recovered by walking downhill
on U from the terminal: normalized-gradient steps of fixed arc length keep
the polyline uniform even though ||grad U|| equals the potential and spans
orders of magnitude.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllTracesFailedError,
    BadParameterError,
    DroppedTraceWarning,
    NoConvergenceError,
    ZeroGradientError,
)
from .eikonal import ArrivalTimeField
from .raster import Point, bilinear_sample


@dataclass(frozen=True)
class GeodesicPath:
    """Ordered polyline from the seed (index 0) to a terminal (last index).

    ``terminal_arrival`` is the arrival time read at the terminal.
    """

    points: np.ndarray  # (K, 2) float64, (x, y)
    terminal_arrival: float

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class CandidatePathSet:
    """A family of geodesics sharing one seed, the observed path sample.

    ``lambdas`` (one array per path, aligned with its points) and ``phi_h``
    are attached by the level-set parameterization step; they are None on a
    freshly traced set.
    """

    paths: list[GeodesicPath]
    lambdas: list[np.ndarray] | None = None
    phi_h: float | None = None

    @property
    def n(self) -> int:
        return len(self.paths)


def _gradient_fields(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # central differences inside, one-sided at the grid edges
    gy, gx = np.gradient(u)
    return gx, gy


def backtrack(arrival: ArrivalTimeField, terminal: Point | tuple,
              step: float = 0.5, tol: float = 1.0,
              max_steps: int | None = None) -> GeodesicPath:
    """Trace the minimal path from ``terminal`` back to the seed.

    Iterates x <- x - step * grad U / ||grad U|| with bilinearly
    interpolated central-difference gradients until within ``tol`` of the
    seed, then appends the exact seed point. Points are returned seed
    first.

    Raises NoConvergenceError when the step budget is exhausted (a
    spurious critical point) and ZeroGradientError when the gradient
    vanishes away from the seed.
    """
    u = arrival.field.values
    h, w = u.shape
    if not (0.0 < step <= 1.0):
        raise BadParameterError(f"step must be in (0, 1], got {step}")
    if tol < step:
        raise BadParameterError(f"tol must be >= step, got tol={tol} step={step}")
    tx, ty = float(terminal[0]), float(terminal[1])
    if not (0.0 <= tx <= w - 1 and 0.0 <= ty <= h - 1):
        raise BadParameterError(f"terminal ({tx}, {ty}) outside {w}x{h} grid")
    if max_steps is None:
        max_steps = int(20 * math.hypot(w, h))

    src = arrival.source
    gx, gy = _gradient_fields(u)
    terminal_arrival = float(bilinear_sample(u, np.asarray([tx]), np.asarray([ty]))[0])

    pts = [(tx, ty)]
    x, y = tx, ty
    for _ in range(max_steps):
        if math.hypot(x - src.x, y - src.y) <= tol:
            break
        g1 = float(bilinear_sample(gx, np.asarray([x]), np.asarray([y]))[0])
        g2 = float(bilinear_sample(gy, np.asarray([x]), np.asarray([y]))[0])
        norm = math.hypot(g1, g2)
        if norm < 1e-12:
            raise ZeroGradientError(f"vanishing gradient at ({x:.2f}, {y:.2f})")
        x = min(max(x - step * g1 / norm, 0.0), w - 1.0)
        y = min(max(y - step * g2 / norm, 0.0), h - 1.0)
        pts.append((x, y))
    else:
        raise NoConvergenceError(
            f"descent from ({tx}, {ty}) did not reach the seed in {max_steps} steps")

    pts.append((src.x, src.y))
    pts.reverse()
    return GeodesicPath(np.array(pts, dtype=np.float64), terminal_arrival)


def trace_candidates(arrival: ArrivalTimeField, terminals: np.ndarray,
                     step: float = 0.5, tol: float = 1.0,
                     max_steps: int | None = None) -> CandidatePathSet:
    """One backtrace per terminal; failed traces are dropped with a warning.

    Results keep the input terminal order. Raises AllTracesFailedError if
    nothing survives.
    """
    terminals = np.asarray(terminals, dtype=np.float64)
    if terminals.size == 0:
        raise BadParameterError("terminals must be nonempty")
    paths = []
    for k, (tx, ty) in enumerate(terminals):
        try:
            paths.append(backtrack(arrival, (tx, ty), step=step, tol=tol,
                                   max_steps=max_steps))
        except (NoConvergenceError, ZeroGradientError) as exc:
            warnings.warn(f"dropping terminal {k} at ({tx:.1f}, {ty:.1f}): {exc}",
                          DroppedTraceWarning, stacklevel=2)
    if not paths:
        raise AllTracesFailedError("all candidate backtraces failed")
    return CandidatePathSet(paths)
