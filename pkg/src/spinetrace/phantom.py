"""Synthetic scenes with known ground truth.

A scene is a bright tube (the shaft) and a bright disc (the head) joined
by a dim narrow neck, optionally cluttered with distractor discs, then
blurred and corrupted with seeded Gaussian noise. Masks are the pre-blur
head and shaft shapes only; the ground-truth centerline runs from the
head centroid along the neck to the shaft boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import BadParameterError, GeometryError
from .raster import (
    BinaryMask,
    ScalarField,
    centroid,
    densify_polyline,
    read_pgm,
    write_pgm,
)


@dataclass(frozen=True)
class Disc:
    center: tuple[float, float]
    radius: float
    intensity: float


@dataclass(frozen=True)
class PhantomConfig:
    width: int
    height: int
    shaft_path: tuple  # polyline vertices ((x, y), ...)
    shaft_radius: float
    head_center: tuple[float, float]
    head_radius: float
    neck_path: tuple   # polyline from head boundary to shaft boundary
    neck_width: float
    neck_attenuation: float
    distractors: tuple  # of Disc
    blur_sigma: float
    noise_sigma: float
    seed: int


@dataclass(frozen=True)
class PhantomScene:
    image: ScalarField
    head_mask: BinaryMask
    shaft_mask: BinaryMask
    truth_centerline: np.ndarray  # (T, 2), ~1 px spacing
    config: PhantomConfig


def _segment_distance(px: np.ndarray, py: np.ndarray, a, b) -> np.ndarray:
    ax, ay = a
    bx, by = b
    dx = bx - ax
    dy = by - ay
    den = dx * dx + dy * dy
    if den == 0.0:
        return np.hypot(px - ax, py - ay)
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / den, 0.0, 1.0)
    return np.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _polyline_distance(px: np.ndarray, py: np.ndarray, polyline) -> np.ndarray:
    pts = [tuple(map(float, p)) for p in polyline]
    if len(pts) == 1:
        return np.hypot(px - pts[0][0], py - pts[0][1])
    d = None
    for a, b in zip(pts[:-1], pts[1:]):
        sd = _segment_distance(px, py, a, b)
        d = sd if d is None else np.minimum(d, sd)
    return d


def point_to_polyline_distance(point, polyline) -> float:
    """Distance from one point to a polyline (used by tests and validation)."""
    px = np.asarray([float(point[0])])
    py = np.asarray([float(point[1])])
    return float(_polyline_distance(px, py, polyline)[0])


def generate(config: PhantomConfig) -> PhantomScene:
    """Render a scene from its configuration, deterministically per seed.

    Shaft and head render at full intensity, the neck at the attenuation
    factor, distractors at their own intensities (maximum composite).
    Gaussian blur (separable, truncated at 3 sigma) is applied before
    additive seeded Gaussian noise. Raises GeometryError when the neck
    endpoints do not touch both structures or the masks overlap.
    """
    if config.head_radius < 1 or config.shaft_radius < 1:
        raise BadParameterError("radii must be at least 1 px")
    if not (0.0 < config.neck_attenuation <= 1.0):
        raise BadParameterError(f"attenuation must be in (0, 1], got {config.neck_attenuation}")
    if config.noise_sigma < 0 or config.blur_sigma < 0:
        raise BadParameterError("sigmas must be nonnegative")

    h, w = config.height, config.width
    yy, xx = np.mgrid[0:h, 0:w]
    px = xx.astype(np.float64)
    py = yy.astype(np.float64)

    d_shaft = _polyline_distance(px, py, config.shaft_path)
    shaft = d_shaft <= config.shaft_radius
    cx, cy = config.head_center
    d_head = np.hypot(px - cx, py - cy)
    head = d_head <= config.head_radius
    if (shaft & head).any():
        raise GeometryError("head and shaft masks overlap")
    if not shaft.any() or not head.any():
        raise GeometryError("head or shaft renders empty")

    neck = np.asarray(config.neck_path, dtype=np.float64)
    e0, e1 = neck[0], neck[-1]
    if abs(np.hypot(e0[0] - cx, e0[1] - cy) - config.head_radius) > 1.0:
        raise GeometryError("neck start does not touch the head boundary")
    if abs(point_to_polyline_distance(e1, config.shaft_path) - config.shaft_radius) > 1.0:
        raise GeometryError("neck end does not touch the shaft boundary")

    image = np.zeros((h, w))
    image = np.maximum(image, shaft * 1.0)
    image = np.maximum(image, head * 1.0)
    d_neck = _polyline_distance(px, py, neck)
    image = np.maximum(image, (d_neck <= config.neck_width / 2.0) * config.neck_attenuation)
    for disc in config.distractors:
        dd = np.hypot(px - disc.center[0], py - disc.center[1])
        image = np.maximum(image, (dd <= disc.radius) * disc.intensity)

    if config.blur_sigma > 0:
        image = gaussian_filter(image, config.blur_sigma, truncate=3.0)
    if config.noise_sigma > 0:
        rng = np.random.default_rng(config.seed)
        image = image + rng.normal(0.0, config.noise_sigma, size=image.shape)
        # clamp to the displayable intensity range so the rendered scene and
        # its PGM round-trip are the same image
        image = np.clip(image, 0.0, 1.0)

    head_mask = BinaryMask(head)
    truth = np.vstack([[list(centroid(head_mask))], neck])
    truth = densify_polyline(truth, spacing=1.0)

    return PhantomScene(ScalarField(image), head_mask, BinaryMask(shaft),
                        truth, config)


def standard_config(seed: int = 0) -> PhantomConfig:
    """The standard 128x128 scene anchoring the verification suite.

    A straight vertical shaft, a head offset 30 px from the shaft axis,
    and a dim neck (attenuation 0.3) arching up to a junction near the
    shaft's lower end. One dim distractor disc nearly bridges the gap
    below the arch, priced so the arrival-time race between the true
    junction and the disc's exit is decided by noise-scale margins that
    swing with the contrast parameter: at the default mu = 7 the disc
    wins and greedy nearest-point prediction exits through the
    distractor, while at other mu values the junction wins. Sampled
    terminals are majority-routed through the true neck at every mu, so
    the median estimate stays on the neck throughout the band.
    """
    return PhantomConfig(
        width=128,
        height=128,
        shaft_path=((24.0, 2.0), (24.0, 114.0)),
        shaft_radius=6.0,
        head_center=(54.0, 100.0),
        head_radius=7.0,
        neck_path=((47.5, 98.5), (41.0, 91.5), (35.0, 92.0), (30.0, 98.0)),
        neck_width=4.0,
        neck_attenuation=0.3,
        distractors=(Disc(center=(41.0, 113.0), radius=9.7, intensity=0.30),),
        blur_sigma=1.0,
        noise_sigma=0.05,
        seed=seed,
    )


PRESETS = {"standard": standard_config}


# ---------------------------------------------------------------------------
# scene bundle I/O
# ---------------------------------------------------------------------------

def config_to_dict(config: PhantomConfig) -> dict:
    return {
        "width": config.width,
        "height": config.height,
        "shaft_path": [list(p) for p in config.shaft_path],
        "shaft_radius": config.shaft_radius,
        "head_center": list(config.head_center),
        "head_radius": config.head_radius,
        "neck_path": [list(p) for p in config.neck_path],
        "neck_width": config.neck_width,
        "neck_attenuation": config.neck_attenuation,
        "distractors": [
            {"center": list(d.center), "radius": d.radius, "intensity": d.intensity}
            for d in config.distractors
        ],
        "blur_sigma": config.blur_sigma,
        "noise_sigma": config.noise_sigma,
        "seed": config.seed,
    }


def config_from_dict(d: dict) -> PhantomConfig:
    return PhantomConfig(
        width=int(d["width"]),
        height=int(d["height"]),
        shaft_path=tuple(tuple(p) for p in d["shaft_path"]),
        shaft_radius=float(d["shaft_radius"]),
        head_center=tuple(d["head_center"]),
        head_radius=float(d["head_radius"]),
        neck_path=tuple(tuple(p) for p in d["neck_path"]),
        neck_width=float(d["neck_width"]),
        neck_attenuation=float(d["neck_attenuation"]),
        distractors=tuple(
            Disc(center=tuple(x["center"]), radius=float(x["radius"]),
                 intensity=float(x["intensity"]))
            for x in d["distractors"]
        ),
        blur_sigma=float(d["blur_sigma"]),
        noise_sigma=float(d["noise_sigma"]),
        seed=int(d["seed"]),
    )


def write_scene(scene: PhantomScene, out_dir: str | Path) -> dict[str, Path]:
    """Write the scene bundle: PGM image, two PGM masks, truth CSV, config JSON."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "image": out / "image.pgm",
        "head_mask": out / "head_mask.pgm",
        "shaft_mask": out / "shaft_mask.pgm",
        "truth": out / "truth.csv",
        "config": out / "config.json",
    }
    write_pgm(paths["image"], scene.image.values, maxval=65535)
    write_pgm(paths["head_mask"], scene.head_mask.bits, maxval=255)
    write_pgm(paths["shaft_mask"], scene.shaft_mask.bits, maxval=255)
    lines = ["index,x,y"]
    for i, (x, y) in enumerate(scene.truth_centerline):
        lines.append(f"{i},{x:.6f},{y:.6f}")
    paths["truth"].write_text("\n".join(lines) + "\n")
    paths["config"].write_text(
        json.dumps(config_to_dict(scene.config), indent=2, sort_keys=True) + "\n")
    return paths


def read_scene(scene_dir: str | Path) -> PhantomScene:
    """Read back a scene bundle written by write_scene."""
    d = Path(scene_dir)
    config = config_from_dict(json.loads((d / "config.json").read_text()))
    image = ScalarField(read_pgm(d / "image.pgm").astype(np.float64))
    head = BinaryMask(read_pgm(d / "head_mask.pgm") != 0)
    shaft = BinaryMask(read_pgm(d / "shaft_mask.pgm") != 0)
    rows = (d / "truth.csv").read_text().strip().splitlines()[1:]
    truth = np.array([[float(r.split(",")[1]), float(r.split(",")[2])] for r in rows])
    return PhantomScene(image, head, shaft, truth, config)
