import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moistrover import raster as rc
from moistrover.calibration import PUBLISHED, invert_calibration
from moistrover.errors import AllMasked, InsufficientSoilPixels, ZeroLuminosity
from moistrover.estimator import (
    FULL_RANGE,
    EstimatorConfig,
    HsvRange,
    estimate_moisture,
    mask_sand,
    normalize_luminosity,
    soil_rgb,
)
from moistrover.field import MoistureField, SoilCamera, render_subfield_image, rhombus_layout


def rgb(a):
    return rc.RgbRaster(np.asarray(a, dtype=np.uint8))


def uniform(px, h=4, w=5):
    return rgb(np.broadcast_to(np.asarray(px, np.uint8), (h, w, 3)))


class TestMask:
    def test_sand_pixel_kept(self):
        # hue 30, s 0.5, v ~0.6
        _, keep = mask_sand(uniform((153, 115, 77)))
        assert keep.all()

    def test_green_excluded(self):
        _, keep = mask_sand(uniform((0, 255, 0)))
        assert not keep.any()

    def test_full_range_keeps_everything(self, rng):
        img = rgb(rng.integers(0, 256, (10, 10, 3)))
        _, keep = mask_sand(img, FULL_RANGE)
        assert keep.all()

    def test_hue_wrap(self):
        reddish = uniform((200, 60, 80))  # hue ~351
        _, keep = mask_sand(reddish, HsvRange(340, 20, 0, 1, 0, 1))
        assert keep.all()
        _, keep = mask_sand(uniform((60, 200, 80)), HsvRange(340, 20, 0, 1, 0, 1))
        assert not keep.any()

    def test_bad_range(self):
        with pytest.raises(ValueError):
            HsvRange(s_lo=0.9, s_hi=0.1)


class TestNormalize:
    def test_already_at_target(self, rng):
        a = rng.integers(0, 256, (6, 6, 3)).astype(np.uint8)
        v = a.max(axis=-1) / 255
        target = float(v.mean())
        out = normalize_luminosity(rgb(a), np.ones((6, 6), bool), target)
        assert np.abs(out.pixels.astype(int) - a).max() <= 1

    def test_uniform_scale(self):
        img = uniform((102, 51, 0))  # V = 0.4
        out = normalize_luminosity(img, np.ones((4, 5), bool), 0.5)
        # 102 * 1.25 = 127.5 sits on a rounding boundary
        assert np.abs(out.pixels.astype(int) - (127.5, 63.75, 0)).max() <= 0.5
        assert out.pixels.max() / 255 == pytest.approx(0.5, abs=1 / 255)

    def test_masked_pixels_untouched(self):
        a = np.full((2, 2, 3), 100, np.uint8)
        mask = np.array([[True, False], [False, False]])
        out = normalize_luminosity(rgb(a), mask, 0.8).pixels
        assert out[0, 0].tolist() == [204] * 3 and np.all(out[1:] == 100)

    def test_zero_luminosity(self):
        with pytest.raises(ZeroLuminosity):
            normalize_luminosity(uniform((0, 0, 0)), np.ones((4, 5), bool))

    def test_all_masked(self):
        with pytest.raises(AllMasked):
            normalize_luminosity(uniform((9, 9, 9)), np.zeros((4, 5), bool))

    def test_caps_at_one(self):
        a = np.array([[[10, 10, 10], [250, 0, 0]]], np.uint8)
        out = normalize_luminosity(rgb(a), np.ones((1, 2), bool), 1.0).pixels
        assert out.max() == 255


class TestEstimate:
    def test_uniform_105_78(self):
        cfg = EstimatorConfig(FULL_RANGE, target_v=105.78 / 255)
        est = estimate_moisture(uniform((200, 200, 200)), PUBLISHED, cfg)
        assert est.avg_gray == pytest.approx(105.78, abs=1e-9)
        assert est.moisture == pytest.approx(20.476, abs=0.005)
        assert est.kept_fraction == 1.0 and not est.clamped
        assert est.format().splitlines()[0] == "moisture=20.476"

    def test_insufficient(self):
        a = np.zeros((20, 20, 3), np.uint8)
        a[:] = (0, 255, 0)
        a[0, :19] = (153, 115, 77)  # 19/400 < 10%
        with pytest.raises(InsufficientSoilPixels):
            estimate_moisture(rgb(a), PUBLISHED)

    def test_soil_rgb_normalizes_to_target_gray(self):
        g = np.linspace(95, 112, 30)
        px = soil_rgb(g)
        v = px.max(axis=-1) / 255
        assert np.allclose(v, 0.7)
        luma = rc.luma(px * (0.5 / v)[:, None])
        assert np.allclose(luma, g)
        hsv = rc.rgb_to_hsv_array(px)
        assert np.allclose(hsv[:, 0], 30)
        assert HsvRange().contains(hsv).all()

    @pytest.mark.parametrize("moisture", [12, 20, 30, 40, 48])
    def test_round_trip_from_rendered_soil(self, moisture):
        region = rhombus_layout().region(5)
        field = MoistureField(200, 160, float(moisture))
        img = render_subfield_image(field, region, PUBLISHED, 0.0, 0)
        est = estimate_moisture(img, PUBLISHED)
        assert abs(est.moisture - moisture) <= 0.5

    @settings(max_examples=25, deadline=None)
    @given(st.floats(12, 48), st.floats(0.7, 1.3))
    def test_exposure_invariance(self, moisture, k):
        region = rhombus_layout().region(1)
        img = render_subfield_image(MoistureField(200, 160, moisture), region, PUBLISHED, 0.0, 0)
        base = estimate_moisture(img, PUBLISHED)
        scaled = rgb(rc.to_u8(img.pixels.astype(float) * k))
        keep = HsvRange().contains(rc.rgb_to_hsv_array(img.pixels))
        scaled_est = estimate_moisture(rgb(np.where(keep[..., None], scaled.pixels, img.pixels)), PUBLISHED)
        assert abs(scaled_est.moisture - base.moisture) <= 1.0
        assert abs(scaled_est.moisture - moisture) <= 1.0

    def test_shrinking_range_never_keeps_more(self, rng):
        a = rgb(rng.integers(0, 256, (30, 30, 3)))
        wide = HsvRange(0, 360, 0, 1, 0, 1)
        narrow = HsvRange(10, 50, 0.1, 0.7, 0.2, 0.9)
        _, kw = mask_sand(a, wide)
        _, kn = mask_sand(a, narrow)
        assert not np.any(kn & ~kw)

    def test_camera_defaults(self):
        cam = SoilCamera()
        assert cam.exposure * (1 + cam.texture) * 1.3 < 1.0  # the V-scaling sweep never clips
        assert invert_calibration(PUBLISHED, 30.43) == pytest.approx(103.034, abs=1e-3)
