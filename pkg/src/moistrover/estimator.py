"""Moisture estimation from a close-up soil image.

Steps: keep only sand-coloured pixels (HSV window), rescale brightness so the
kept pixels share a fixed mean V, take the mean grayscale of the kept pixels,
and map it through the calibration polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import raster as rc
from .calibration import PolynomialModel, predict_moisture
from .errors import AllMasked, InsufficientSoilPixels, ZeroLuminosity


@dataclass(frozen=True)
class HsvRange:
    """Inclusive HSV window. ``h_lo > h_hi`` wraps through 0 degrees."""

    h_lo: float = 10.0
    h_hi: float = 50.0
    s_lo: float = 0.05
    s_hi: float = 0.8
    v_lo: float = 0.15
    v_hi: float = 1.0

    def __post_init__(self):
        if self.s_lo > self.s_hi or self.v_lo > self.v_hi:
            raise ValueError("HsvRange needs s_lo <= s_hi and v_lo <= v_hi")

    def contains(self, hsv: np.ndarray) -> np.ndarray:
        h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
        if self.h_lo <= self.h_hi:
            in_h = (h >= self.h_lo) & (h <= self.h_hi)
        else:
            in_h = (h >= self.h_lo) | (h <= self.h_hi)
        return in_h & (s >= self.s_lo) & (s <= self.s_hi) & (v >= self.v_lo) & (v <= self.v_hi)


FULL_RANGE = HsvRange(0.0, 360.0, 0.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True)
class EstimatorConfig:
    hsv: HsvRange = field(default_factory=HsvRange)
    target_v: float = 0.5
    min_kept_fraction: float = 0.10


class MoistureEstimate(NamedTuple):
    moisture: float
    avg_gray: float
    kept_fraction: float
    clamped: bool

    def format(self) -> str:
        return (
            f"moisture={self.moisture:.3f}\navg_gray={self.avg_gray:.3f}\n"
            f"kept_fraction={self.kept_fraction:.3f}\nclamped={str(self.clamped).lower()}\n"
        )


def mask_sand(img: rc.RgbRaster, hsv_range: HsvRange = HsvRange()) -> tuple[rc.RgbRaster, np.ndarray]:
    """Return the untouched image and a boolean keep-mask."""
    keep = hsv_range.contains(rc.rgb_to_hsv_array(img.pixels))
    return img, keep


def _normalized(img: rc.RgbRaster, mask: np.ndarray, target_v: float) -> np.ndarray:
    if not 0 < target_v <= 1:
        raise ValueError("target_v must be in (0, 1]")
    if not mask.any():
        raise AllMasked("no pixel survived the sand mask")
    rgb = img.pixels.astype(float)
    v = rgb.max(axis=-1) / 255.0
    mean_v = float(v[mask].mean())
    if mean_v == 0:
        raise ZeroLuminosity("kept pixels are all black")
    gain = target_v / mean_v
    # scaling RGB uniformly scales V and leaves H and S alone; cap V at 1
    scaled_v = v * gain
    factor = np.where(scaled_v > 1.0, 1.0 / np.where(v > 0, v, 1.0), gain)
    out = rgb * np.where(mask, factor, 1.0)[..., None]
    return out


def normalize_luminosity(img: rc.RgbRaster, mask: np.ndarray, target_v: float = 0.5) -> rc.RgbRaster:
    """Rescale kept pixels so their mean V equals ``target_v``; H and S are kept."""
    return rc.RgbRaster(rc.to_u8(_normalized(img, mask, target_v)))


def estimate_moisture(
    img: rc.RgbRaster, model: PolynomialModel, cfg: EstimatorConfig = EstimatorConfig()
) -> MoistureEstimate:
    _, keep = mask_sand(img, cfg.hsv)
    kept_fraction = float(keep.mean())
    if kept_fraction < cfg.min_kept_fraction:
        raise InsufficientSoilPixels(
            f"only {kept_fraction:.3f} of pixels look like soil (need {cfg.min_kept_fraction:.3f})"
        )
    # stays in float: re-quantizing to 8 bits here would bias the mean gray
    normalized = _normalized(img, keep, cfg.target_v)
    avg_gray = float(rc.luma(normalized)[keep].mean())
    pred = predict_moisture(model, avg_gray)
    return MoistureEstimate(pred.moisture, avg_gray, kept_fraction, pred.clamped)


# -- synthetic soil colour ----------------------------------------------------

SOIL_HUE = 30.0


def soil_rgb(gray, target_v: float = 0.5, exposure: float = 0.7, hue: float = SOIL_HUE) -> np.ndarray:
    """Float RGB of a soil pixel that normalizes to the given mean gray.

    The pixel has hue ``hue`` (in [0, 60)) and value ``exposure``; its
    saturation is chosen so that, once V is brought to ``target_v``, its luma
    equals ``gray``. Wetter (darker) soil comes out more saturated.
    """
    if not 0 <= hue < 60:
        raise ValueError("soil hue must lie in [0, 60)")
    gray = np.asarray(gray, dtype=float)
    f = hue / 60.0
    wr, wg, wb = rc.LUMA_WEIGHTS
    k = wg * (1.0 - f) + wb  # luma drop per unit saturation, relative to V
    sat = np.clip((1.0 - gray / (255.0 * target_v)) / k, 0.0, 1.0)
    v = 255.0 * exposure
    r = np.full_like(sat, v)
    g = v * (1.0 - sat * (1.0 - f))
    b = v * (1.0 - sat)
    return np.stack([r, g, b], axis=-1)
