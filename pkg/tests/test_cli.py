import json
from pathlib import Path

import numpy as np
import pytest

from spinetrace.cli import main
from spinetrace.phantom import generate, standard_config, write_scene
from spinetrace.raster import write_pgm


@pytest.fixture(scope="module")
def scene_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("scene")
    write_scene(generate(standard_config(seed=0)), d)
    return d


def run_cli(*args):
    return main([str(a) for a in args])


class TestPhantomCmd:
    def test_standard_preset(self, tmp_path):
        out = tmp_path / "bundle"
        assert run_cli("phantom", "standard", "--out-dir", out) == 0
        for name in ("image.pgm", "head_mask.pgm", "shaft_mask.pgm",
                     "truth.csv", "config.json"):
            assert (out / name).exists()

    def test_seed_override_recorded(self, tmp_path):
        out = tmp_path / "b2"
        assert run_cli("phantom", "standard", "--seed", 77, "--out-dir", out) == 0
        assert json.loads((out / "config.json").read_text())["seed"] == 77

    def test_unknown_preset(self, tmp_path, capsys):
        code = run_cli("phantom", "nosuch", "--out-dir", tmp_path / "x")
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_invalid_geometry_config(self, tmp_path, capsys):
        from spinetrace.phantom import config_to_dict, standard_config
        bad = config_to_dict(standard_config())
        bad["neck_path"] = [[90.0, 20.0], [95.0, 25.0]]  # touches nothing
        cfg = tmp_path / "bad.json"
        cfg.write_text(json.dumps(bad))
        code = run_cli("phantom", "--config", cfg, "--out-dir", tmp_path / "y")
        assert code == 2
        assert "neck" in capsys.readouterr().err


class TestReconstructCmd:
    def test_happy_path(self, scene_dir, tmp_path, capsys):
        out = tmp_path / "run"
        code = run_cli("reconstruct", scene_dir / "image.pgm",
                       scene_dir / "head_mask.pgm", scene_dir / "shaft_mask.pgm",
                       "--out-dir", out, "--truth", scene_dir / "truth.csv",
                       "--export-candidates", "--dump-arrival")
        assert code == 0
        assert (out / "median.csv").read_text().startswith("lambda,x,y")
        assert (out / "spline.csv").exists()
        assert (out / "terminals.csv").read_text().startswith("index,x,y")
        assert len(list((out / "candidates").glob("path_*.csv"))) == 15
        assert (out / "arrival.csv").exists()
        meta = json.loads((out / "metadata.json").read_text())
        for key in ("mu", "w", "n_terminals", "n_lambda", "spline_samples",
                    "seed", "method", "source_pixel"):
            assert key in meta
        svg = (out / "overlay.svg").read_text()
        assert svg.startswith("<svg") and "polyline" in svg and "base64" in svg
        # the reconstructed curve evaluated against the scene truth
        assert run_cli("eval", out / "spline.csv", scene_dir / "truth.csv",
                       "--json", out / "eval.json") == 0
        assert json.loads((out / "eval.json").read_text())["mae_px"] <= 3.0

    def test_byte_identical_reruns(self, scene_dir, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert run_cli("reconstruct", scene_dir / "image.pgm",
                           scene_dir / "head_mask.pgm", scene_dir / "shaft_mask.pgm",
                           "--out-dir", out) == 0
            outs.append(out)
        for f in ("median.csv", "spline.csv", "metadata.json", "overlay.svg",
                  "terminals.csv"):
            assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()

    def test_baseline_method(self, scene_dir, tmp_path):
        out = tmp_path / "base"
        code = run_cli("reconstruct", scene_dir / "image.pgm",
                       scene_dir / "head_mask.pgm", scene_dir / "shaft_mask.pgm",
                       "--out-dir", out, "--method", "baseline")
        assert code == 0
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["method"] == "baseline"
        assert meta["n_candidates"] == 1

    def test_mismatched_dimensions_exit_2(self, scene_dir, tmp_path, capsys):
        small = tmp_path / "small.pgm"
        write_pgm(small, np.zeros((16, 16), bool), maxval=255)
        code = run_cli("reconstruct", scene_dir / "image.pgm", small,
                       scene_dir / "shaft_mask.pgm", "--out-dir", tmp_path / "o")
        assert code == 2
        assert "validate" in capsys.readouterr().err

    def test_missing_file_exit_4(self, scene_dir, tmp_path, capsys):
        code = run_cli("reconstruct", scene_dir / "nope.pgm",
                       scene_dir / "head_mask.pgm", scene_dir / "shaft_mask.pgm",
                       "--out-dir", tmp_path / "o")
        assert code == 4


class TestEvalCmd:
    def test_identical_files(self, scene_dir, tmp_path, capsys):
        code = run_cli("eval", scene_dir / "truth.csv", scene_dir / "truth.csv",
                       "--json", tmp_path / "e.json")
        assert code == 0
        assert "MAE: 0.000000" in capsys.readouterr().out
        assert json.loads((tmp_path / "e.json").read_text())["mae_px"] == 0.0

    def test_singleton_sets(self, tmp_path, capsys):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        a.write_text("index,x,y\n0,0,0\n")
        b.write_text("index,x,y\n0,3,4\n")
        assert run_cli("eval", a, b, "--json", tmp_path / "e.json") == 0
        assert json.loads((tmp_path / "e.json").read_text())["mae_px"] == pytest.approx(10.0)


class TestSweepCmd:
    def test_small_sweep(self, scene_dir, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = run_cli("sweep", scene_dir, "--mu-values", "7", "--runs", 1,
                       "--seed", 0, "--out", out)
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "mu,method,mean_mae,std_mae,n_runs,n_failed"
        assert len(lines) == 3
