import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moistrover.calibration import PUBLISHED, invert_calibration
from moistrover.estimator import estimate_moisture
from moistrover.field import (
    Bump,
    MoistureField,
    Region,
    SoilCamera,
    points_in_polygon,
    region_mean,
    render_aerial,
    render_subfield_image,
    rhombus_layout,
    synth_field,
)
from moistrover import raster as rc


class TestMoistureField:
    def test_no_bumps_is_constant(self):
        f = synth_field(base=33.0)
        x, y = np.meshgrid(np.linspace(0, 200, 17), np.linspace(0, 160, 13))
        assert np.all(f(x, y) == 33.0)

    def test_bump_peak(self):
        f = MoistureField(bumps=(Bump(50, 50, 10, 20),))
        assert f(50, 50) == 48.0
        assert f(50, 70) == pytest.approx(38 + 10 * math.exp(-0.5))

    def test_clamped(self):
        f = MoistureField(base=95, bumps=(Bump(0, 0, 20, 10),))
        assert f(0, 0) == 100.0

    def test_bad_radius(self):
        with pytest.raises(ValueError):
            MoistureField(bumps=(Bump(0, 0, 1, 0),))

    def test_seeded_random_bumps(self):
        a = synth_field(n_random=4, seed=11)
        b = synth_field(n_random=4, seed=11)
        assert a == b and len(a.bumps) == 4
        assert synth_field(n_random=4, seed=12) != a

    @settings(max_examples=20)
    @given(st.integers(0, 10_000))
    def test_lipschitz_bound_holds(self, seed):
        f = synth_field(n_random=5, seed=seed)
        rng = np.random.default_rng(seed)
        p = rng.uniform((0, 0), (200, 160), (400, 2))
        q = p + rng.normal(0, 3, p.shape)
        d = np.hypot(*(p - q).T)
        diff = np.abs(f(p[:, 0], p[:, 1]) - f(q[:, 0], q[:, 1]))
        assert np.all(diff <= f.lipschitz_bound * d + 1e-9)


class TestLayout:
    def test_centroids(self, rhombus_layout_default):
        cents = [r.centroid for r in rhombus_layout_default.regions]
        expected = [(33.333, 26.667), (166.667, 26.667), (166.667, 133.333), (33.333, 133.333), (100, 80)]
        for c, e in zip(cents, expected):
            assert c == pytest.approx(e, abs=1e-3)

    def test_regions_partition_off_path_points(self, rhombus_layout_default, rng):
        lay = rhombus_layout_default
        x = rng.uniform(0, 200, 4000)
        y = rng.uniform(0, 160, 4000)
        count = sum(r.contains(x, y).astype(int) for r in lay.regions)
        on_path = lay.path_mask(x, y)
        assert np.all(count[~on_path] == 1)
        assert np.all(count[on_path] == 0)

    def test_sensors_sit_in_their_region(self, rhombus_layout_default):
        for r in rhombus_layout_default.regions:
            assert r.contains(*r.centroid)

    def test_point_in_polygon_square(self):
        sq = ((0, 0), (1, 0), (1, 1), (0, 1))
        assert points_in_polygon(sq, np.array([0.5, 1.5]), np.array([0.5, 0.5])).tolist() == [True, False]

    def test_aerial_shape_and_colors(self, rhombus_aerial):
        assert (rhombus_aerial.width, rhombus_aerial.height) == (440, 360)
        px = rhombus_aerial.pixels
        assert px[0, 0].tolist() == [190, 190, 190]
        assert px[20, 20].tolist() == [0, 0, 0]
        assert px[20 + 160, 20 + 10].tolist() == [235, 235, 235]  # west vertex of the path
        assert px[20 + 20, 20 + 20].tolist() == [58, 40, 26]

    def test_render_aerial_deterministic(self, rhombus_layout_default):
        a = render_aerial(rhombus_layout_default)
        b = render_aerial(rhombus_layout_default)
        assert a == b


class TestSubfieldImage:
    def test_round_trip_30_43(self):
        region = rhombus_layout().region(2)
        img = render_subfield_image(MoistureField(base=30.43), region, PUBLISHED, 0.0, 0)
        est = estimate_moisture(img, PUBLISHED)
        assert est.moisture == pytest.approx(30.43, abs=0.5)
        assert est.avg_gray == pytest.approx(invert_calibration(PUBLISHED, 30.43), abs=0.05)

    def test_same_seed_same_bytes(self):
        region = rhombus_layout().region(5)
        f = MoistureField(bumps=(Bump(100, 80, -10, 30),))
        a = render_subfield_image(f, region, PUBLISHED, 2.0, 99)
        b = render_subfield_image(f, region, PUBLISHED, 2.0, 99)
        c = render_subfield_image(f, region, PUBLISHED, 2.0, 100)
        assert a == b and a != c

    def test_zero_area_region(self):
        flat = Region(9, ((0, 0), (10, 0), (20, 0)))
        with pytest.raises(ValueError):
            render_subfield_image(MoistureField(), flat, PUBLISHED)

    def test_outside_pixels_are_path_white(self):
        region = rhombus_layout().region(1)
        img = render_subfield_image(MoistureField(), region, PUBLISHED)
        assert img.pixels[-1, -1].tolist() == [235, 235, 235]
        assert rc.rgb_to_hsv(tuple(img.pixels[0, 0])).h == pytest.approx(30, abs=3)

    def test_resolution(self):
        region = rhombus_layout().region(5)
        img = render_subfield_image(MoistureField(), region, PUBLISHED, camera=SoilCamera(px_per_cm=0.5))
        assert (img.width, img.height) == (100, 80)

    def test_region_mean_constant(self):
        assert region_mean(MoistureField(base=21.5), rhombus_layout().region(3)) == pytest.approx(21.5)

    @pytest.mark.parametrize("rid", [1, 2, 3, 4, 5])
    def test_estimate_tracks_region_mean(self, rid):
        region = rhombus_layout().region(rid)
        f = MoistureField(bumps=(Bump(120, 60, -15, 50), Bump(40, 110, 7, 40)))
        img = render_subfield_image(f, region, PUBLISHED, 1.0, rid)
        assert estimate_moisture(img, PUBLISHED).moisture == pytest.approx(region_mean(f, region), abs=0.5)
