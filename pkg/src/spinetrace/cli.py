"""Command-line interface.

Subcommands: reconstruct, phantom, eval, sweep. Exit codes: 0 success,
2 input validation, 3 numerical failure, 4 I/O. All outputs are
deterministic for fixed inputs and flags.
"""

from __future__ import annotations

import argparse
import base64
import json
import struct
import sys
import zlib
from pathlib import Path

import numpy as np

from .errors import NumericalError, SpineTraceError, ValidationError
from .metrics import format_sweep, mae, mu_sweep
from .phantom import PRESETS, config_from_dict, generate, read_scene, write_scene
from .pipeline import ReconstructionResult, RunConfig, run_reconstruction
from .raster import ScalarField, read_image, read_mask

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _write_path_csv(path: Path, lambdas: np.ndarray, points: np.ndarray) -> None:
    lines = ["lambda,x,y"]
    for lam, (x, y) in zip(lambdas, points):
        lines.append(f"{lam:.9g},{x:.9g},{y:.9g}")
    path.write_text("\n".join(lines) + "\n")


def _write_indexed_csv(path: Path, points: np.ndarray) -> None:
    lines = ["index,x,y"]
    for i, (x, y) in enumerate(points):
        lines.append(f"{i},{x:.9g},{y:.9g}")
    path.write_text("\n".join(lines) + "\n")


def _read_points_csv(path: Path) -> np.ndarray:
    rows = path.read_text().strip().splitlines()
    if rows and not rows[0][0].isdigit() and not rows[0].startswith("-"):
        rows = rows[1:]  # header
    pts = []
    for r in rows:
        cols = r.split(",")
        pts.append((float(cols[-2]), float(cols[-1])))
    if not pts:
        raise ValidationError(f"no points in {path}")
    return np.asarray(pts)


def _png_bytes(gray: np.ndarray) -> bytes:
    """Encode an 8-bit grayscale image as PNG (stdlib only, deterministic)."""
    h, w = gray.shape
    raw = b"".join(b"\x00" + gray[y].astype(np.uint8).tobytes() for y in range(h))

    def chunk(tag: bytes, data: bytes) -> bytes:
        return (struct.pack(">I", len(data)) + tag + data
                + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF))

    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    idat = zlib.compress(raw, 9)
    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr)
            + chunk(b"IDAT", idat) + chunk(b"IEND", b""))


def _polyline_svg(points: np.ndarray, color: str, width: float, dash: str = "") -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{extra}/>')


def write_overlay_svg(path: Path, image: ScalarField, result: ReconstructionResult,
                      head_mask=None, truth: np.ndarray | None = None) -> None:
    """SVG overlay: image background, mask contours, and the predicted curve."""
    from .raster import extract_boundary, normalize_image

    v = normalize_image(image).values
    png = _png_bytes(np.rint(v * 255).astype(np.uint8))
    b64 = base64.b64encode(png).decode("ascii")
    w = image.width
    h = image.height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{4 * w}" height="{4 * h}" '
        f'viewBox="-0.5 -0.5 {w} {h}">',
        f'<image href="data:image/png;base64,{b64}" x="-0.5" y="-0.5" '
        f'width="{w}" height="{h}" preserveAspectRatio="none" '
        'style="image-rendering:pixelated"/>',
    ]
    shaft_ring = result.boundary
    parts.append(_polyline_svg(np.vstack([shaft_ring, shaft_ring[:1]]), "#00e0e0", 0.4))
    if head_mask is not None:
        head_ring = extract_boundary(head_mask)
        parts.append(_polyline_svg(np.vstack([head_ring, head_ring[:1]]), "#ffffff", 0.4))
    if truth is not None:
        parts.append(_polyline_svg(truth, "#ffffff", 0.4, dash="1.5,1.5"))
    spline = result.reconstruction.spline_points
    if spline is not None:
        parts.append(_polyline_svg(spline, "#ffd700", 0.6))
    parts.append(f'<circle cx="{result.head_centroid.x:.2f}" '
                 f'cy="{result.head_centroid.y:.2f}" r="0.8" fill="#ff4040"/>')
    for tx, ty in result.terminals:
        parts.append(f'<circle cx="{tx:.2f}" cy="{ty:.2f}" r="0.6" fill="#40a0ff"/>')
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_reconstruct(args) -> int:
    config = RunConfig(mu=args.mu, w=args.w, n_terminals=args.n_terminals,
                       n_lambda=args.n_lambda, spline_samples=args.spline_samples,
                       seed=args.seed, method=args.method)
    image = read_image(args.image)
    head = read_mask(args.head_mask)
    shaft = read_mask(args.shaft_mask)
    result = run_reconstruction(image, head, shaft, config)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    recon = result.reconstruction
    _write_path_csv(out / "median.csv", recon.lambda_grid, recon.median_points)
    spline_lam = np.linspace(recon.lambda_grid[0], recon.lambda_grid[-1],
                             len(recon.spline_points))
    _write_path_csv(out / "spline.csv", spline_lam, recon.spline_points)
    (out / "metadata.json").write_text(
        json.dumps(recon.params, indent=2, sort_keys=True) + "\n")
    _write_indexed_csv(out / "terminals.csv", result.terminals)
    if args.export_candidates:
        cdir = out / "candidates"
        cdir.mkdir(exist_ok=True)
        for k, path in enumerate(result.candidates.paths):
            _write_indexed_csv(cdir / f"path_{k:03d}.csv", path.points)
    if args.dump_arrival:
        from .raster import write_csv_field
        write_csv_field(out / "arrival.csv", result.arrival.field)
    truth = _read_points_csv(Path(args.truth)) if args.truth else None
    write_overlay_svg(out / "overlay.svg", image, result, head_mask=head, truth=truth)
    print(f"reconstruction written to {out}")
    return 0


def cmd_phantom(args) -> int:
    if args.config:
        config = config_from_dict(json.loads(Path(args.config).read_text()))
        if args.seed is not None:
            config = config_from_dict({**json.loads(Path(args.config).read_text()),
                                       "seed": args.seed})
    else:
        preset = PRESETS.get(args.preset)
        if preset is None:
            raise ValidationError(
                f"unknown preset {args.preset!r}; available: {sorted(PRESETS)}")
        config = preset(seed=args.seed if args.seed is not None else 0)
    scene = generate(config)
    paths = write_scene(scene, args.out_dir)
    print(f"phantom scene written to {Path(args.out_dir)}")
    for k, p in paths.items():
        print(f"  {k}: {p.name}")
    return 0


def cmd_eval(args) -> int:
    u = _read_points_csv(Path(args.reconstruction))
    v = _read_points_csv(Path(args.truth))
    value = mae(u, v)
    print(f"MAE: {value:.6f} px")
    out = Path(args.json) if args.json else Path(args.reconstruction).parent / "eval.json"
    out.write_text(json.dumps({"mae_px": value}, indent=2) + "\n")
    return 0


def cmd_sweep(args) -> int:
    scene = read_scene(args.scene_dir)
    mu_values = [float(m) for m in args.mu_values.split(",")]
    rows = mu_sweep(scene, mu_values, runs_per_mu=args.runs, base_seed=args.seed)
    print(format_sweep(rows))
    out = Path(args.out) if args.out else Path(args.scene_dir) / "sweep.csv"
    lines = ["mu,method,mean_mae,std_mae,n_runs,n_failed"]
    for r in rows:
        lines.append(f"{r.mu:.9g},{r.method},{r.mean_mae:.9g},{r.std_mae:.9g},"
                     f"{r.n_runs},{r.n_failed}")
    out.write_text("\n".join(lines) + "\n")
    print(f"table written to {out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinetrace",
        description="Trace the centerline of a dim tubular connection between "
                    "a detached blob and a tube in a 2D grayscale image.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reconstruct", help="reconstruct a neck centerline")
    p.add_argument("image", help="grayscale image (PGM or CSV raster)")
    p.add_argument("head_mask", help="head segmentation mask (PGM, nonzero=true)")
    p.add_argument("shaft_mask", help="shaft segmentation mask (PGM, nonzero=true)")
    p.add_argument("--out-dir", default="out", help="output directory")
    p.add_argument("--mu", type=float, default=7.0, help="contrast parameter")
    p.add_argument("--w", type=float, default=0.01, help="smoothness weight")
    p.add_argument("--n-terminals", type=int, default=15)
    p.add_argument("--n-lambda", type=int, default=25)
    p.add_argument("--spline-samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("proposed", "baseline"), default="proposed")
    p.add_argument("--truth", default=None, help="optional truth CSV for the overlay")
    p.add_argument("--export-candidates", action="store_true",
                   help="write each candidate path as candidates/path_NNN.csv")
    p.add_argument("--dump-arrival", action="store_true",
                   help="write the arrival-time field as arrival.csv (debug)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("phantom", help="generate a synthetic scene bundle")
    p.add_argument("preset", nargs="?", default="standard",
                   help=f"preset name ({', '.join(sorted(PRESETS))})")
    p.add_argument("--config", default=None, help="config JSON instead of a preset")
    p.add_argument("--seed", type=int, default=None, help="seed override")
    p.add_argument("--out-dir", default="phantom_out")
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("eval", help="mean absolute error between two path CSVs")
    p.add_argument("reconstruction", help="reconstruction CSV (lambda,x,y)")
    p.add_argument("truth", help="ground-truth CSV (index,x,y)")
    p.add_argument("--json", default=None, help="where to write the JSON result")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="mu sensitivity sweep on a scene bundle")
    p.add_argument("scene_dir", help="scene bundle directory (see phantom)")
    p.add_argument("--mu-values", default="3.7,5,7,8.7,10")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output CSV path")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        stage = getattr(exc, "stage", args.command)
        print(f"error at {stage}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        stage = getattr(exc, "stage", args.command)
        print(f"error at {stage}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SpineTraceError as exc:
        print(f"error at {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
