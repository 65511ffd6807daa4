import numpy as np
import pytest

from spinetrace.errors import (
    ConstantImageError,
    EmptyMaskError,
    ExtraComponentsWarning,
    FullMaskError,
)
from spinetrace.raster import (
    BinaryMask,
    ScalarField,
    bilinear_sample,
    centroid,
    densify_polyline,
    extract_boundary,
    normalize_image,
    read_csv_field,
    read_mask,
    read_pgm,
    signed_distance,
    write_csv_field,
    write_pgm,
)

from conftest import random_blob
from oracles import brute_boundary_set, brute_signed_distance


def field(values):
    return ScalarField(np.asarray(values, dtype=float))


class TestNormalize:
    def test_linear_rescale(self):
        f = field([[0, 50, 100]] * 3)
        out = normalize_image(f)
        assert np.allclose(out.values, [[0.0, 0.5, 1.0]] * 3)

    def test_identity_on_normalized(self):
        v = np.zeros((3, 3))
        v[0, 0] = 1.0
        out = normalize_image(field(v))
        assert np.array_equal(out.values, v)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        f = field(rng.random((8, 8)) * 90 + 5)
        once = normalize_image(f)
        twice = normalize_image(once)
        assert np.allclose(once.values, twice.values, atol=1e-15)

    def test_constant_image(self):
        with pytest.raises(ConstantImageError):
            normalize_image(field(np.full((4, 4), 10.0)))


class TestSignedDistance:
    def test_single_pixel_three_four_five(self):
        bits = np.zeros((12, 12), bool)
        bits[5, 5] = True
        phi = signed_distance(BinaryMask(bits)).values
        assert phi[5, 5] == 0.0
        assert phi[9, 8] == pytest.approx(5.0)  # (8,9) is 3-4-5 from (5,5)

    def test_block_interior_sign(self):
        bits = np.zeros((9, 9), bool)
        bits[2:7, 2:7] = True
        phi = signed_distance(BinaryMask(bits)).values
        assert phi[3, 3] == pytest.approx(-1.0)  # one step inside the edge
        assert phi[4, 4] == pytest.approx(-2.0)
        assert phi[2, 2] == 0.0

    def test_random_masks_match_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            bits = rng.random((16, 16)) < 0.35
            if not bits.any() or bits.all():
                continue
            phi = signed_distance(BinaryMask(bits)).values
            assert np.allclose(phi, brute_signed_distance(bits), atol=1e-9)

    def test_lipschitz_up_to_discretization(self):
        rng = np.random.default_rng(5)
        bits = random_blob(rng)
        phi = signed_distance(BinaryMask(bits)).values
        h, w = phi.shape
        pts = rng.integers(0, [w, h], size=(60, 2))
        for (x1, y1), (x2, y2) in zip(pts[:30], pts[30:]):
            lhs = abs(phi[y1, x1] - phi[y2, x2])
            assert lhs <= np.hypot(x1 - x2, y1 - y2) + 1.0 + 1e-9

    def test_sign_partition(self):
        rng = np.random.default_rng(6)
        bits = random_blob(rng)
        phi = signed_distance(BinaryMask(bits)).values
        assert (phi[~bits] > 0).all()
        interior = bits & (phi < 0)
        # negative pixels must have all 4-neighbors true
        ys, xs = np.nonzero(interior)
        for x, y in zip(xs, ys):
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                assert bits[y + dy, x + dx]

    def test_empty_and_full(self):
        with pytest.raises(EmptyMaskError):
            signed_distance(BinaryMask(np.zeros((4, 4), bool)))
        with pytest.raises(FullMaskError):
            signed_distance(BinaryMask(np.ones((4, 4), bool)))


class TestBoundary:
    def test_block_ring(self):
        bits = np.zeros((7, 7), bool)
        bits[2:5, 2:5] = True
        ring = extract_boundary(BinaryMask(bits))
        assert len(ring) == 8
        assert (3.0, 3.0) not in {tuple(p) for p in ring}  # center excluded
        steps = np.hypot(*np.diff(ring, axis=0).T)
        assert (steps <= np.sqrt(2) + 1e-9).all()

    def test_single_pixel(self):
        bits = np.zeros((5, 5), bool)
        bits[2, 3] = True
        ring = extract_boundary(BinaryMask(bits))
        assert ring.shape == (1, 2)
        assert tuple(ring[0]) == (3.0, 2.0)

    def test_random_blobs_match_scan_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            bits = random_blob(rng)
            ring = extract_boundary(BinaryMask(bits))
            assert {tuple(p) for p in ring} == brute_boundary_set(bits)
            # distinct points, subset of mask, sqrt(2) steps
            assert len({tuple(p) for p in ring}) == len(ring)
            for x, y in ring:
                assert bits[int(y), int(x)]
            steps = np.hypot(*np.diff(ring, axis=0).T)
            assert (steps <= np.sqrt(2) + 1e-9).all()

    def test_orientation_consistent(self):
        # counterclockwise in the y-up frame = negative shoelace in raw
        # row coordinates
        rng = np.random.default_rng(8)
        for _ in range(5):
            bits = random_blob(rng)
            ring = extract_boundary(BinaryMask(bits))
            x, y = ring[:, 0], ring[:, 1]
            area2 = np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
            assert area2 < 0

    def test_largest_component_with_warning(self):
        bits = np.zeros((12, 12), bool)
        bits[1:7, 1:7] = True
        bits[9:11, 9:11] = True
        with pytest.warns(ExtraComponentsWarning):
            ring = extract_boundary(BinaryMask(bits))
        assert all(x < 8 and y < 8 for x, y in ring)


class TestCentroid:
    def test_single_pixel(self):
        bits = np.zeros((9, 9), bool)
        bits[7, 4] = True
        assert tuple(centroid(BinaryMask(bits))) == (4.0, 7.0)

    def test_block_symmetry(self):
        bits = np.zeros((4, 4), bool)
        bits[0:2, 0:2] = True
        assert tuple(centroid(BinaryMask(bits))) == (0.5, 0.5)

    def test_l_shape(self):
        bits = np.zeros((4, 4), bool)
        bits[0, 0] = bits[0, 1] = bits[1, 0] = True
        c = centroid(BinaryMask(bits))
        assert c.x == pytest.approx(1 / 3)
        assert c.y == pytest.approx(1 / 3)

    def test_empty(self):
        with pytest.raises(EmptyMaskError):
            centroid(BinaryMask(np.zeros((3, 3), bool)))


class TestBilinear:
    def test_exact_at_integers(self):
        rng = np.random.default_rng(2)
        v = rng.random((6, 7))
        xs = np.array([0, 3, 6, 2])
        ys = np.array([0, 2, 5, 4])
        assert np.allclose(bilinear_sample(v, xs, ys), v[ys, xs])

    def test_midpoint_average(self):
        v = np.array([[0.0, 1.0, 0.5], [2.0, 3.0, 0.5], [1.0, 1.0, 1.0]])
        got = bilinear_sample(v, np.array([0.5]), np.array([0.5]))[0]
        assert got == pytest.approx(1.5)


class TestDensify:
    def test_spacing_and_endpoints(self):
        line = np.array([[0.0, 0.0], [10.0, 0.0]])
        out = densify_polyline(line, 1.0)
        assert np.allclose(out[0], [0, 0]) and np.allclose(out[-1], [10, 0])
        steps = np.hypot(*np.diff(out, axis=0).T)
        assert (steps <= 1.0 + 1e-9).all()


class TestIO:
    @pytest.mark.parametrize("maxval", [255, 65535])
    def test_pgm_roundtrip(self, tmp_path, maxval):
        rng = np.random.default_rng(4)
        v = rng.random((9, 13))
        p = tmp_path / "x.pgm"
        write_pgm(p, v, maxval=maxval)
        back = read_pgm(p)
        assert back.shape == (9, 13)
        assert np.allclose(back / maxval, np.clip(v, 0, 1), atol=0.5 / maxval + 1e-12)

    def test_pgm_mask_roundtrip(self, tmp_path):
        rng = np.random.default_rng(9)
        bits = random_blob(rng)
        p = tmp_path / "m.pgm"
        write_pgm(p, bits, maxval=255)
        assert np.array_equal(read_mask(p).bits, bits)

    def test_pgm_comment_header(self, tmp_path):
        p = tmp_path / "c.pgm"
        p.write_bytes(b"P5\n# a comment\n3 2\n255\n" + bytes(6))
        assert read_pgm(p).shape == (2, 3)

    def test_csv_roundtrip(self, tmp_path):
        rng = np.random.default_rng(10)
        f = ScalarField(rng.random((5, 4)))
        p = tmp_path / "f.csv"
        write_csv_field(p, f)
        back = read_csv_field(p)
        assert np.allclose(back.values, f.values, atol=1e-9)
