"""Raster primitives: scalar fields, binary masks, level sets and contours.

Conventions used throughout the package:

* pixel-center coordinates: the pixel at column ``x``, row ``y`` is the
  point ``(x, y)``; sub-pixel positions arise only from interpolation,
* ``(x, y)`` order everywhere in the public API, with ``x`` the column
  index and ``y`` the row index of the underlying row-major array,
* scalar rasters are ``float64`` arrays of shape ``(height, width)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple
import warnings

import numpy as np
from scipy import ndimage

from .errors import (
    ConstantImageError,
    EmptyMaskError,
    ExtraComponentsWarning,
    FullMaskError,
    ValidationError,
)


class Point(NamedTuple):
    """A real-valued pixel-center coordinate."""

    x: float
    y: float


@dataclass(frozen=True)
class ScalarField:
    """A width x height raster of real values.

    Wraps a ``(height, width)`` float64 array. The grid must be at least
    3 x 3 so that central differences and bilinear interpolation are
    defined everywhere.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValidationError(f"scalar field must be 2D, got shape {v.shape}")
        if v.shape[0] < 3 or v.shape[1] < 3:
            raise ValidationError(f"grid must be at least 3x3, got {v.shape[1]}x{v.shape[0]}")
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width - 1 and 0.0 <= y <= self.height - 1

    def sample(self, x: float, y: float) -> float:
        """Bilinearly interpolated value at a real position (clamped to the grid)."""
        return float(bilinear_sample(self.values, np.asarray([x]), np.asarray([y]))[0])


@dataclass(frozen=True)
class BinaryMask:
    """Per-pixel membership raster."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.dtype != np.bool_:
            b = b.astype(bool)
        if b.ndim != 2:
            raise ValidationError(f"mask must be 2D, got shape {b.shape}")
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def count(self) -> int:
        return int(self.bits.sum())


def bilinear_sample(values: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized bilinear interpolation with edge clamping.

    At integer coordinates this returns the grid value exactly.
    """
    h, w = values.shape
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, w - 1.0)
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, h - 1.0)
    x0 = np.minimum(xs.astype(np.int64), w - 2)
    y0 = np.minimum(ys.astype(np.int64), h - 2)
    fx = xs - x0
    fy = ys - y0
    v00 = values[y0, x0]
    v01 = values[y0, x0 + 1]
    v10 = values[y0 + 1, x0]
    v11 = values[y0 + 1, x0 + 1]
    return (v00 * (1 - fx) * (1 - fy) + v01 * fx * (1 - fy)
            + v10 * (1 - fx) * fy + v11 * fx * fy)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def normalize_image(raw: ScalarField) -> ScalarField:
    """Linearly rescale an image to [0, 1]; min maps to 0, max to 1.

    Raises ConstantImageError when all pixels are equal. Idempotent on
    already-normalized input.
    """
    v = raw.values
    lo = float(v.min())
    hi = float(v.max())
    if hi == lo:
        raise ConstantImageError("image has a single grey value")
    return ScalarField((v - lo) / (hi - lo))


def signed_distance(mask: BinaryMask) -> ScalarField:
    """Exact Euclidean signed distance to the mask boundary.

    Positive outside the mask, negative strictly inside, and exactly zero
    on the mask's boundary pixels (true pixels with a false 4-neighbor,
    pixel-center convention). Outside values equal the distance to the
    nearest true pixel.
    """
    bits = mask.bits
    n_true = int(bits.sum())
    if n_true == 0:
        raise EmptyMaskError("signed_distance needs a non-empty mask")
    if n_true == bits.size:
        raise FullMaskError("signed_distance needs a non-full mask")
    outside = ndimage.distance_transform_edt(~bits)
    inside = ndimage.distance_transform_edt(bits)
    phi = np.where(bits, -(inside - 1.0), outside)
    return ScalarField(phi)


def centroid(mask: BinaryMask) -> Point:
    """Arithmetic mean of the true-pixel coordinates."""
    ys, xs = np.nonzero(mask.bits)
    if xs.size == 0:
        raise EmptyMaskError("centroid of an empty mask")
    return Point(float(xs.mean()), float(ys.mean()))


_MOORE_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
# (dx, dy) offsets in counterclockwise order for the bottom-left-origin frame
# (y up); in array coordinates with y down this walks clockwise on screen.


def largest_component(mask: BinaryMask) -> BinaryMask:
    """The largest 8-connected component of the mask (ties: lowest label)."""
    labels, n = ndimage.label(mask.bits, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        raise EmptyMaskError("mask has no true pixel")
    if n > 1:
        warnings.warn(f"mask has {n} connected components; using the largest",
                      ExtraComponentsWarning, stacklevel=2)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    return BinaryMask(labels == int(sizes.argmax()))


def extract_boundary(mask: BinaryMask) -> np.ndarray:
    """Outer contour of the largest connected component, in ring order.

    Moore-neighbor tracing around the component, oriented counterclockwise
    in the y-up frame. Every returned point is a true pixel with at least
    one false 4-neighbor (out-of-grid counts as false); consecutive points
    are at most sqrt(2) apart. Returns an (M, 2) float array of distinct
    (x, y) pixel coordinates.
    """
    comp = largest_component(mask).bits
    h, w = comp.shape

    def is_true(x: int, y: int) -> bool:
        return 0 <= x < w and 0 <= y < h and comp[y, x]

    ys, xs = np.nonzero(comp)
    # topmost row, then leftmost column: its W and N neighbors are false
    k = np.lexsort((xs, ys))[0]
    start = (int(xs[k]), int(ys[k]))

    if comp.sum() == 1:
        return np.array([start], dtype=np.float64)

    ring = _MOORE_RING
    contour: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()

    cur = start
    back = 0  # index into ring of the backtrack direction (W of start is false)
    first_move = None
    while True:
        nxt = None
        for off in range(1, 9):
            ridx = (back + off) % 8
            dx, dy = ring[ridx]
            cand = (cur[0] + dx, cur[1] + dy)
            if is_true(*cand):
                nxt = cand
                # new backtrack: the position just before cand in the scan,
                # expressed relative to cand
                pdx, pdy = ring[(back + off - 1) % 8]
                bx = cur[0] + pdx - cand[0]
                by = cur[1] + pdy - cand[1]
                back = _MOORE_RING.index((bx, by))
                break
        if nxt is None:  # isolated pixel (cannot happen: count > 1 and 8-connected)
            break
        if cur not in seen:
            seen.add(cur)
            contour.append(cur)
        move = (nxt[0] - cur[0], nxt[1] - cur[1])
        if first_move is None:
            first_move = move
        elif cur == start and move == first_move:
            break  # closed the loop entering the same way as the first time
        cur = nxt
        if len(contour) > 4 * comp.size:  # defensive stall guard
            break
    return np.array(contour, dtype=np.float64)


def densify_polyline(points: np.ndarray, spacing: float = 1.0) -> np.ndarray:
    """Resample a polyline at roughly uniform spacing, keeping both endpoints."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError(f"polyline must be (K, 2), got {pts.shape}")
    if len(pts) == 1:
        return pts.copy()
    seg = np.diff(pts, axis=0)
    seglen = np.hypot(seg[:, 0], seg[:, 1])
    s = np.concatenate([[0.0], np.cumsum(seglen)])
    total = s[-1]
    if total == 0.0:
        return pts[:1].copy()
    n = max(2, int(np.ceil(total / spacing)) + 1)
    t = np.linspace(0.0, total, n)
    return np.column_stack([np.interp(t, s, pts[:, 0]), np.interp(t, s, pts[:, 1])])


# ---------------------------------------------------------------------------
# file I/O: binary PGM (P5) and CSV rasters
# ---------------------------------------------------------------------------

def _read_pgm_header(data: bytes):
    # header tokens: magic, width, height, maxval; '#' comments allowed
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        tok = b""
        while pos < len(data) and not data[pos:pos + 1].isspace():
            tok += data[pos:pos + 1]
            pos += 1
        if not tok:
            raise ValidationError("truncated PGM header")
        tokens.append(tok)
    return tokens, pos + 1  # single whitespace after maxval


def read_pgm(path: str | Path) -> np.ndarray:
    """Read a binary PGM (P5, 8- or 16-bit) into a 2D integer array."""
    data = Path(path).read_bytes()
    tokens, offset = _read_pgm_header(data)
    if tokens[0] != b"P5":
        raise ValidationError(f"not a binary PGM (P5) file: magic {tokens[0]!r}")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if not (0 < maxval < 65536):
        raise ValidationError(f"bad PGM maxval {maxval}")
    if maxval < 256:
        arr = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset)
    else:
        arr = np.frombuffer(data, dtype=">u2", count=w * h, offset=offset)
    if arr.size != w * h:
        raise ValidationError("truncated PGM pixel data")
    return arr.reshape(h, w).astype(np.uint16 if maxval >= 256 else np.uint8)


def write_pgm(path: str | Path, values: np.ndarray, maxval: int = 65535) -> None:
    """Write a [0, 1]-scaled float or boolean raster as binary PGM (P5)."""
    v = np.asarray(values)
    if v.dtype == np.bool_:
        scaled = np.where(v, maxval, 0)
    else:
        scaled = np.rint(np.clip(v, 0.0, 1.0) * maxval)
    h, w = v.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode()
    if maxval < 256:
        body = scaled.astype(np.uint8).tobytes()
    else:
        body = scaled.astype(">u2").tobytes()
    Path(path).write_bytes(header + body)


def read_image(path: str | Path) -> ScalarField:
    """Read a grayscale image (PGM or CSV raster) as a ScalarField of raw values."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return read_csv_field(p)
    return ScalarField(read_pgm(p).astype(np.float64))


def read_mask(path: str | Path) -> BinaryMask:
    """Read a mask (PGM or CSV raster); nonzero means true."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        return BinaryMask(read_csv_field(p).values != 0)
    return BinaryMask(read_pgm(p) != 0)


def read_csv_field(path: str | Path) -> ScalarField:
    """Read a plain-text CSV raster (one row per grid row)."""
    try:
        v = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise ValidationError(f"bad CSV raster {path}: {exc}") from exc
    return ScalarField(v)


def write_csv_field(path: str | Path, field: ScalarField) -> None:
    """Write a ScalarField as a plain-text CSV raster (debugging aid)."""
    np.savetxt(path, field.values, delimiter=",", fmt="%.10g")
