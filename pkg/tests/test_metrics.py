import numpy as np
import pytest

from spinetrace.errors import BadParameterError, EmptySetError
from spinetrace.metrics import PointSet2D, derive_seed, format_sweep, mae, mu_sweep


class TestMae:
    def test_identity(self):
        rng = np.random.default_rng(0)
        pts = rng.random((12, 2)) * 30
        assert mae(pts, pts.copy()) == 0.0

    def test_three_four_five_both_ways(self):
        assert mae(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])) == pytest.approx(10.0)

    def test_hand_arithmetic(self):
        u = np.array([[0.0, 0.0], [1.0, 0.0]])
        v = np.array([[0.0, 0.0]])
        assert mae(u, v) == pytest.approx(0.5)

    def test_symmetry_and_translation(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            u = rng.random((rng.integers(1, 40), 2)) * 100
            v = rng.random((rng.integers(1, 40), 2)) * 100
            assert mae(u, v) == mae(v, u)
            shift = rng.random(2) * 50
            assert mae(u + shift, v + shift) == pytest.approx(mae(u, v), abs=1e-9)

    def test_zero_iff_mutually_contained(self):
        u = np.array([[1.0, 2.0], [3.0, 4.0]])
        v = np.array([[3.0, 4.0], [1.0, 2.0], [1.0, 2.0]])
        assert mae(u, v) == 0.0
        assert mae(u, np.array([[1.0, 2.0]])) > 0.0

    def test_accepts_point_sets(self):
        u = PointSet2D(np.array([[0.0, 0.0]]), "recon")
        v = PointSet2D(np.array([[3.0, 4.0]]), "truth")
        assert mae(u, v) == pytest.approx(10.0)

    def test_empty(self):
        with pytest.raises(EmptySetError):
            mae(np.empty((0, 2)), np.array([[1.0, 1.0]]))


class TestMuSweep:
    def test_single_cell_two_rows(self, standard_scene):
        rows = mu_sweep(standard_scene, [7.0], runs_per_mu=1, base_seed=0)
        assert len(rows) == 2
        assert {r.method for r in rows} == {"proposed", "baseline"}
        assert all(r.n_runs == 1 and r.n_failed == 0 for r in rows)

    def test_deterministic(self, standard_scene):
        a = mu_sweep(standard_scene, [5.0], runs_per_mu=2, base_seed=3)
        b = mu_sweep(standard_scene, [5.0], runs_per_mu=2, base_seed=3)
        assert a == b

    def test_derived_seeds_distinct(self):
        seeds = {derive_seed(0, m, r) for m in range(5) for r in range(10)}
        assert len(seeds) == 50

    def test_format(self, standard_scene):
        rows = mu_sweep(standard_scene, [7.0], runs_per_mu=1, base_seed=0)
        text = format_sweep(rows)
        assert "proposed" in text and "baseline" in text

    def test_validation(self, standard_scene):
        with pytest.raises(BadParameterError):
            mu_sweep(standard_scene, [], runs_per_mu=1, base_seed=0)
        with pytest.raises(BadParameterError):
            mu_sweep(standard_scene, [7.0], runs_per_mu=0, base_seed=0)
