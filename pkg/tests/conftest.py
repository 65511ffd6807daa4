import numpy as np
import pytest
from scipy.ndimage import binary_fill_holes, gaussian_filter

from spinetrace.phantom import Disc, PhantomConfig, generate, standard_config


@pytest.fixture(scope="session")
def standard_scene():
    return generate(standard_config(seed=0))


def random_blob(rng, size=24, n_discs=4, r_lo=3.0, r_hi=5.0):
    """A thick, hole-free random blob: a chain of overlapping discs."""
    yy, xx = np.mgrid[0:size, 0:size]
    cx = rng.uniform(size * 0.3, size * 0.7)
    cy = rng.uniform(size * 0.3, size * 0.7)
    bits = np.zeros((size, size), bool)
    for _ in range(n_discs):
        r = rng.uniform(r_lo, r_hi)
        bits |= np.hypot(xx - cx, yy - cy) <= r
        ang = rng.uniform(0, 2 * np.pi)
        step = rng.uniform(0.5, 0.9) * r
        cx = float(np.clip(cx + step * np.cos(ang), r_lo + 1, size - r_lo - 2))
        cy = float(np.clip(cy + step * np.sin(ang), r_lo + 1, size - r_lo - 2))
    return binary_fill_holes(bits)


def random_scene(rng):
    """A randomized valid phantom: vertical shaft, offset head, arched neck."""
    shaft_x = float(rng.uniform(20, 28))
    shaft_r = float(rng.uniform(5, 7))
    head_r = float(rng.uniform(5.5, 8))
    gap = float(rng.uniform(14, 20))
    hx = shaft_x + shaft_r + gap + head_r
    hy = float(rng.uniform(45, 85))
    ey = float(np.clip(hy + rng.uniform(-10, 10), 20, 108))
    bulge = float(rng.uniform(-6, 6))
    start = (hx - head_r, hy)
    end = (shaft_x + shaft_r, ey)
    mid = (0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1]) + bulge)
    config = PhantomConfig(
        width=128, height=128,
        shaft_path=((shaft_x, 2.0), (shaft_x, 120.0)),
        shaft_radius=shaft_r,
        head_center=(hx, hy), head_radius=head_r,
        neck_path=(start, mid, end),
        neck_width=float(rng.uniform(2.5, 4.0)),
        neck_attenuation=float(rng.uniform(0.3, 0.6)),
        distractors=(),
        blur_sigma=1.0,
        noise_sigma=float(rng.uniform(0.0, 0.05)),
        seed=int(rng.integers(0, 2**31)),
    )
    return generate(config)


def smooth_random_potential(rng, size=9, lo=0.3, blur=1.5):
    """Smooth positive random potential: the regime where grid-path costs
    bracket the continuous solution."""
    g = gaussian_filter(rng.random((size, size)), blur, mode="nearest")
    g = (g - g.min()) / (g.max() - g.min())
    return lo + (1.0 - lo) * g
