"""Level-set parameterization of candidate paths and the robust estimate.

Every candidate path is re-parameterized by the shaft level set: a point
with signed distance ``phi`` gets curve parameter

    lambda = 1 - phi / phi_h

with ``phi_h`` the signed distance at the shared source, so lambda runs
from 0 at the source to 1 on the shaft boundary for every candidate. On a
common lambda grid the estimate at each grid value is the intrinsic
median of the candidate points: the observed point of median rank along
the iso-contour of phi at the matching level. A least-squares cubic
spline smooths the discrete estimate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import LSQUnivariateSpline

from .errors import (
    AllCandidatesFailedError,
    BadParameterError,
    FitFailureError,
    HeadInsideShaftError,
    NoContourError,
    NoCrossingError,
    SplineFallbackWarning,
    ValidationError,
)
from .geodesic import CandidatePathSet, GeodesicPath
from .raster import Point, ScalarField, bilinear_sample


@dataclass(frozen=True)
class SpineReconstruction:
    """The estimated discrete path and its smoothed curve."""

    lambda_grid: np.ndarray      # (N,) in (0, 1)
    median_points: np.ndarray    # (N, 2)
    spline_points: np.ndarray | None  # (M, 2) once smoothed
    params: dict


@dataclass(frozen=True)
class Contour:
    """One connected iso-contour polyline; closed loops do not repeat the
    first vertex."""

    points: np.ndarray  # (V, 2)
    closed: bool

    def arc_lengths(self) -> np.ndarray:
        """Cumulative arc length at each vertex (starting at 0)."""
        seg = np.diff(self.points, axis=0)
        return np.concatenate([[0.0], np.cumsum(np.hypot(seg[:, 0], seg[:, 1]))])

    def total_length(self) -> float:
        pts = self.points
        length = float(self.arc_lengths()[-1])
        if self.closed and len(pts) > 1:
            length += float(np.hypot(*(pts[0] - pts[-1])))
        return length


# ---------------------------------------------------------------------------
# parameterization and resampling
# ---------------------------------------------------------------------------

def parameterize(path: GeodesicPath, phi: ScalarField, p_h: Point | tuple) -> np.ndarray:
    """Per-point curve parameter 1 - phi/phi_h, clamped to [0, 1].

    Requires the source strictly outside the shaft (phi(p_h) > 0). phi is
    read by bilinear interpolation, so the parameter is 0 at p_h and
    exactly 1 wherever the path meets the zero level set.
    """
    phi_h = phi.sample(float(p_h[0]), float(p_h[1]))
    if phi_h <= 0.0:
        raise HeadInsideShaftError(
            f"source ({p_h[0]:.2f}, {p_h[1]:.2f}) has phi = {phi_h:.3f} <= 0")
    pts = path.points
    vals = bilinear_sample(phi.values, pts[:, 0], pts[:, 1])
    return np.clip(1.0 - vals / phi_h, 0.0, 1.0)


def parameterize_candidates(cands: CandidatePathSet, phi: ScalarField) -> CandidatePathSet:
    """Attach lambda arrays (and phi_h) to a traced candidate set.

    All paths must share their first point, the common source.
    """
    if cands.n < 1:
        raise ValidationError("candidate set is empty")
    src = cands.paths[0].points[0]
    for p in cands.paths:
        if np.abs(p.points[0] - src).max() > 1e-6:
            raise ValidationError("candidate paths do not share a common source")
    p_h = Point(float(src[0]), float(src[1]))
    lambdas = [parameterize(p, phi, p_h) for p in cands.paths]
    return CandidatePathSet(cands.paths, lambdas=lambdas,
                            phi_h=phi.sample(p_h.x, p_h.y))


def _first_crossing(points: np.ndarray, lambdas: np.ndarray, t: float) -> np.ndarray | None:
    # first index pair (walking from the source) where lambda crosses t
    lam = lambdas
    for k in range(len(lam) - 1):
        a = lam[k] - t
        b = lam[k + 1] - t
        if a == 0.0:
            return points[k]
        if a * b <= 0.0:
            denom = lam[k + 1] - lam[k]
            if denom == 0.0:
                return points[k]
            alpha = (t - lam[k]) / denom
            return points[k] + alpha * (points[k + 1] - points[k])
    if lam[-1] == t:
        return points[-1]
    return None


def resample(path: GeodesicPath, lambdas: np.ndarray, grid) -> np.ndarray:
    """Path coordinates at each grid parameter, by first-crossing interpolation.

    The grid must be strictly increasing inside (0, 1). For non-monotone
    lambda sequences (a path that grazes the shaft and retreats) the first
    crossing from the source side is used.
    """
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise BadParameterError("grid must be a nonempty 1D array")
    if np.any(np.diff(grid) <= 0) or grid[0] <= 0.0 or grid[-1] >= 1.0:
        raise BadParameterError("grid must be strictly increasing inside (0, 1)")
    lambdas = np.asarray(lambdas, dtype=np.float64)
    out = np.empty((grid.size, 2))
    for i, t in enumerate(grid):
        p = _first_crossing(path.points, lambdas, float(t))
        if p is None:
            raise NoCrossingError(f"path never crosses lambda = {t}")
        out[i] = p
    return out


# ---------------------------------------------------------------------------
# iso-contour extraction (marching squares)
# ---------------------------------------------------------------------------

def iso_contours(field: ScalarField | np.ndarray, level: float) -> list[Contour]:
    """All connected iso-contours of a field at a level, as polylines.

    Marching squares with linear interpolation on cell edges. Vertices on
    shared cell edges are computed once, so adjacent cells chain exactly.
    Saddle cells are disambiguated by the cell-center mean. Contours are
    consistently oriented; open contours start and end at the grid border.
    """
    v = field.values if isinstance(field, ScalarField) else np.asarray(field, float)
    h, w = v.shape
    if np.any(v == level):
        # nodes exactly on the level create four-way vertex junctions that
        # break chaining; nudge them off by a value far below pixel scale
        eps = 1e-9 * max(1.0, abs(level), float(v.max() - v.min()))
        v = np.where(v == level, level + eps, v)
    inside = v < level

    # crossing parameters on horizontal edges (y, x)-(y, x+1) and vertical
    # edges (y, x)-(y+1, x); shared-edge vertices are computed exactly once
    hx = inside[:, :-1] != inside[:, 1:]
    vx = inside[:-1, :] != inside[1:, :]
    if not hx.any() and not vx.any():
        return []

    verts: dict[int, tuple[float, float]] = {}
    hys, hxs = np.nonzero(hx)
    t = (level - v[hys, hxs]) / (v[hys, hxs + 1] - v[hys, hxs])
    for yy, xx, tt in zip(hys.tolist(), hxs.tolist(), t.tolist()):
        verts[2 * (yy * w + xx)] = (xx + tt, float(yy))
    vys, vxs = np.nonzero(vx)
    t = (level - v[vys, vxs]) / (v[vys + 1, vxs] - v[vys, vxs])
    for yy, xx, tt in zip(vys.tolist(), vxs.tolist(), t.tolist()):
        verts[2 * (yy * w + xx) + 1] = (float(xx), yy + tt)

    def h_edge(x, y):
        return 2 * (y * w + x)

    def v_edge(x, y):
        return 2 * (y * w + x) + 1

    # cells incident to any crossed edge
    cell_mask = np.zeros((h - 1, w - 1), dtype=bool)
    cell_mask |= hx[:-1, :]   # top edges
    cell_mask |= hx[1:, :]    # bottom edges
    cell_mask |= vx[:, :-1]   # left edges
    cell_mask |= vx[:, 1:]    # right edges

    succ: dict[int, int] = {}
    pred: dict[int, int] = {}

    def emit(e_a: int, e_b: int) -> None:
        # orient so the below-level region sits on a fixed side of the
        # segment; probe the field just off the midpoint
        pa = verts[e_a]
        pb = verts[e_b]
        dx = pb[0] - pa[0]
        dy = pb[1] - pa[1]
        norm = (dx * dx + dy * dy) ** 0.5
        if norm > 1e-12:
            mx = 0.5 * (pa[0] + pb[0]) + 0.1 * dy / norm
            my = 0.5 * (pa[1] + pb[1]) - 0.1 * dx / norm
            val = bilinear_sample(v, np.asarray([mx]), np.asarray([my]))[0]
            if val >= level:
                e_a, e_b = e_b, e_a
        succ[e_a] = e_b
        pred[e_b] = e_a

    for cy, cx in zip(*np.nonzero(cell_mask)):
        cy = int(cy)
        cx = int(cx)
        edges = []
        if hx[cy, cx]:
            edges.append(h_edge(cx, cy))
        if vx[cy, cx + 1]:
            edges.append(v_edge(cx + 1, cy))
        if hx[cy + 1, cx]:
            edges.append(h_edge(cx, cy + 1))
        if vx[cy, cx]:
            edges.append(v_edge(cx, cy))
        if len(edges) == 2:
            emit(edges[0], edges[1])
        elif len(edges) == 4:
            # saddle: pair crossings around the corners isolated by the
            # center value
            center_inside = 0.25 * (v[cy, cx] + v[cy, cx + 1]
                                    + v[cy + 1, cx] + v[cy + 1, cx + 1]) < level
            top, right, bottom, left = edges
            if inside[cy, cx] == center_inside:
                emit(top, right)
                emit(bottom, left)
            else:
                emit(top, left)
                emit(bottom, right)

    # walk chains: open contours first (no predecessor), then loops
    contours: list[Contour] = []
    visited: set[int] = set()
    starts = [e for e in succ if e not in pred]
    for e0 in starts:
        chain = [e0]
        visited.add(e0)
        e = e0
        while e in succ:
            e = succ[e]
            if e in visited:
                break
            chain.append(e)
            visited.add(e)
        contours.append(Contour(np.array([verts[e] for e in chain]), closed=False))
    for e0 in succ:
        if e0 in visited:
            continue
        chain = [e0]
        visited.add(e0)
        e = succ.get(e0)
        while e is not None and e != e0 and e not in visited:
            chain.append(e)
            visited.add(e)
            e = succ.get(e)
        contours.append(Contour(np.array([verts[e] for e in chain]), closed=True))
    return contours


# ---------------------------------------------------------------------------
# intrinsic median and the pointwise estimate
# ---------------------------------------------------------------------------

def _arc_positions(contour: Contour, points: np.ndarray) -> tuple[np.ndarray, float]:
    """Arc-length position of each point's nearest contour vertex, plus the
    summed projection distance (used for contour-component selection)."""
    cpts = contour.points
    d2 = ((points[:, None, :] - cpts[None, :, :]) ** 2).sum(axis=2)
    nearest = d2.argmin(axis=1)
    total = float(np.sqrt(d2.min(axis=1)).sum())
    pos = contour.arc_lengths()[nearest]
    if contour.closed and len(cpts) > 1:
        # the seam of a loop is arbitrary; re-anchor it inside the largest
        # gap between projected points so one cluster is never split
        length = contour.total_length()
        order = np.argsort(pos)
        sorted_pos = pos[order]
        gaps = np.diff(sorted_pos)
        wrap_gap = sorted_pos[0] + length - sorted_pos[-1]
        k = int(np.argmax(np.concatenate([gaps, [wrap_gap]])))
        origin = sorted_pos[(k + 1) % len(sorted_pos)]
        pos = np.mod(pos - origin, length)
    return pos, total


def intrinsic_median(points: np.ndarray, phi: ScalarField, level: float) -> Point:
    """The observed point of median rank along the phi iso-contour at a level.

    The contour component nearest to the point cloud (smallest summed
    vertex distance) defines the ordering: each point is projected to its
    nearest contour vertex and ranked by arc-length position. The original
    point (not its projection) at the median rank is returned; even counts
    take the lower-middle rank so the result is always an observed point.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.size == 0:
        raise ValidationError("intrinsic_median of an empty point list")
    if level <= 0.0:
        raise BadParameterError(f"level must be positive, got {level}")
    contours = iso_contours(phi, level)
    if not contours:
        raise NoContourError(f"level set {level} is empty")
    best = None
    for c in contours:
        pos, total = _arc_positions(c, pts)
        if best is None or total < best[1]:
            best = (pos, total)
    pos = best[0]
    # rank by arc position; coordinate tie-breaks keep the result
    # independent of the input ordering
    order = np.lexsort((pts[:, 1], pts[:, 0], pos))
    med = pts[order[(len(pts) - 1) // 2]]
    return Point(float(med[0]), float(med[1]))


def estimate_path(cands: CandidatePathSet, phi: ScalarField, n_lambda: int) -> SpineReconstruction:
    """Pointwise intrinsic-median estimate on the interior lambda grid.

    The grid is i/(N+1) for i = 1..N, so the estimate never degenerates to
    the fixed endpoints. At each grid value every candidate is resampled
    by first crossing and the intrinsic median is taken on the iso-contour
    at the matching level (1 - lambda) * phi_h; candidates that fail to
    resample at a value are excluded at that value only.
    """
    if n_lambda < 3:
        raise BadParameterError(f"n_lambda must be >= 3, got {n_lambda}")
    if cands.n < 1:
        raise ValidationError("candidate set is empty")
    if cands.lambdas is None or cands.phi_h is None:
        raise ValidationError("candidate set is not parameterized "
                              "(run parameterize_candidates first)")
    grid = np.arange(1, n_lambda + 1, dtype=np.float64) / (n_lambda + 1)
    medians = np.empty((n_lambda, 2))
    for i, t in enumerate(grid):
        pts = []
        for path, lam in zip(cands.paths, cands.lambdas):
            p = _first_crossing(path.points, lam, float(t))
            if p is not None:
                pts.append(p)
        if not pts:
            raise AllCandidatesFailedError(f"no candidate could be resampled at lambda = {t}")
        level = (1.0 - float(t)) * cands.phi_h
        med = intrinsic_median(np.asarray(pts), phi, level)
        medians[i] = (med.x, med.y)
    return SpineReconstruction(lambda_grid=grid, median_points=medians,
                               spline_points=None,
                               params={"n_candidates": cands.n, "n_lambda": n_lambda})


def spline_smooth(recon: SpineReconstruction, n_samples: int) -> SpineReconstruction:
    """Least-squares cubic spline fit of x(lambda) and y(lambda).

    Uses max(2, N // 5) interior knots at uniform lambda and evaluates at
    ``n_samples`` uniform values over the grid's span. Endpoints are
    pinned to the first and last median points by a linear correction
    (which keeps the curve a cubic spline). A singular fit falls back to
    the median polyline with a warning.
    """
    if recon.median_points is None or len(recon.median_points) < 3:
        raise FitFailureError("median points missing or too few to fit")
    if not np.isfinite(recon.median_points).all():
        raise FitFailureError("median points contain non-finite values")
    n = len(recon.lambda_grid)
    if n_samples < n:
        raise BadParameterError(f"n_samples must be >= {n}, got {n_samples}")
    lam = recon.lambda_grid
    ts = np.linspace(lam[0], lam[-1], n_samples)
    n_knots = max(2, n // 5)
    knots = np.linspace(lam[0], lam[-1], n_knots + 2)[1:-1]
    out = np.empty((n_samples, 2))
    for col in range(2):
        data = recon.median_points[:, col]
        try:
            spl = LSQUnivariateSpline(lam, data, knots, k=3)
            fitted = spl(ts)
            lo_err = data[0] - float(spl(lam[0]))
            hi_err = data[-1] - float(spl(lam[-1]))
        except Exception as exc:  # singular normal equations
            warnings.warn(f"spline fit failed ({exc}); falling back to polyline",
                          SplineFallbackWarning, stacklevel=2)
            fitted = np.interp(ts, lam, data)
            lo_err = 0.0
            hi_err = 0.0
        span = lam[-1] - lam[0]
        fitted = fitted + lo_err * (lam[-1] - ts) / span + hi_err * (ts - lam[0]) / span
        out[:, col] = fitted
    params = dict(recon.params)
    params.update(spline_samples=int(n_samples), spline_knots=int(n_knots))
    return replace(recon, spline_points=out, params=params)
