"""Small raster toolkit: pixel formats, color conversion, blur, thresholding,
connected components, cropping and resizing.

Rasters wrap read-only numpy arrays. Every function returns a new raster and
never mutates its input, so rasters can be shared freely between threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import ndimage

from .errors import DegenerateHistogram, NoFieldFound

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
OTSU_FALLBACK = 128


def _frozen(arr: np.ndarray, dtype, ndim: int) -> np.ndarray:
    a = np.array(arr, dtype=dtype, copy=True)
    if a.ndim != ndim:
        raise ValueError(f"expected {ndim}-d pixel array, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError("raster must be at least 1x1")
    a.setflags(write=False)
    return a


class _Raster:
    pixels: np.ndarray

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.height, self.width

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((type(self).__name__, self.pixels.shape, self.pixels.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({self.width}x{self.height})"


@dataclass(frozen=True, eq=False, repr=False)
class RgbRaster(_Raster):
    """8-bit RGB image, ``pixels`` shaped (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"RGB pixels must be (h, w, 3), got {px.shape}")
        _check_u8(px)
        object.__setattr__(self, "pixels", _frozen(px, np.uint8, 3))


@dataclass(frozen=True, eq=False, repr=False)
class GrayRaster(_Raster):
    """8-bit single-channel image, ``pixels`` shaped (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        _check_u8(px)
        object.__setattr__(self, "pixels", _frozen(px, np.uint8, 2))


@dataclass(frozen=True, eq=False, repr=False)
class BinaryRaster(_Raster):
    """Boolean image; True means white (free)."""

    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _frozen(self.pixels, bool, 2))


Raster = Union[RgbRaster, GrayRaster]


def _check_u8(px: np.ndarray) -> None:
    if px.dtype != np.uint8 and px.size and (px.min() < 0 or px.max() > 255):
        raise ValueError("channel values must lie in [0, 255]")


def round_half_up(x):
    """Round to nearest integer, halves away from -inf (0.5 -> 1)."""
    return np.floor(np.asarray(x, dtype=float) + 0.5)


def to_u8(x) -> np.ndarray:
    return np.clip(round_half_up(x), 0, 255).astype(np.uint8)


# -- color -----------------------------------------------------------------


def luma(rgb: np.ndarray) -> np.ndarray:
    """Unrounded BT.601 luma of an (..., 3) array, as float."""
    rgb = np.asarray(rgb, dtype=float)
    r, g, b = LUMA_WEIGHTS
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


def to_grayscale(img: RgbRaster) -> GrayRaster:
    return GrayRaster(to_u8(luma(img.pixels)))


class HsvPixel(NamedTuple):
    h: float  # degrees, [0, 360)
    s: float
    v: float


def rgb_to_hsv(pixel) -> HsvPixel:
    hsv = rgb_to_hsv_array(np.asarray(pixel, dtype=float))
    return HsvPixel(float(hsv[0]), float(hsv[1]), float(hsv[2]))


def rgb_to_hsv_array(rgb: np.ndarray) -> np.ndarray:
    """Hexcone HSV for an (..., 3) array of 0-255 values.

    Returns (..., 3) floats: hue in degrees [0, 360), saturation and value in
    [0, 1]. Saturation is 0 when max == min, and hue is 0 whenever S is 0.
    """
    rgb = np.asarray(rgb, dtype=float) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = mx - mn
    chroma = delta > 0
    safe = np.where(chroma, delta, 1.0)

    h = np.zeros_like(mx)
    rmax = chroma & (mx == r)
    gmax = chroma & (mx == g) & ~rmax
    bmax = chroma & ~rmax & ~gmax
    h = np.where(rmax, ((g - b) / safe) % 6.0, h)
    h = np.where(gmax, (b - r) / safe + 2.0, h)
    h = np.where(bmax, (r - g) / safe + 4.0, h)
    h = (h * 60.0) % 360.0

    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)
    s = np.where(chroma, s, 0.0)
    return np.stack([h, s, mx], axis=-1)


# -- filtering -------------------------------------------------------------


def gaussian_kernel(sigma: float, radius: int | None = None) -> np.ndarray:
    """Unit-sum 1-D Gaussian of width 2*radius+1 (radius defaults to ceil(3 sigma))."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if radius is None:
        radius = max(1, math.ceil(3 * sigma))
    if radius < 1:
        raise ValueError("radius must be >= 1")
    x = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: GrayRaster, sigma: float, radius: int | None = None) -> GrayRaster:
    k = gaussian_kernel(sigma, radius)
    src = img.pixels.astype(float)
    # replicate borders; accumulate in float, round once at the end
    tmp = ndimage.correlate1d(src, k, axis=1, mode="nearest")
    out = ndimage.correlate1d(tmp, k, axis=0, mode="nearest")
    return GrayRaster(to_u8(out))


# -- thresholding ----------------------------------------------------------


class OtsuResult(NamedTuple):
    threshold: int
    degenerate: bool


def otsu_threshold(img: GrayRaster) -> OtsuResult:
    """Exhaustive Otsu scan over t in 0..255.

    Class 0 is ``intensity < t``, class 1 is ``intensity >= t``. Between-class
    variance is compared exactly in integers; ties go to the lowest t. A
    single-valued image has no valid split and falls back to t=128.
    """
    hist = np.bincount(img.pixels.ravel(), minlength=256).tolist()
    if sum(1 for h in hist if h) < 2:
        return OtsuResult(OTSU_FALLBACK, True)

    total_n = sum(hist)
    total_s = sum(i * h for i, h in enumerate(hist))
    best_t, best_num, best_den = 0, -1, 1
    n0 = s0 = 0
    for t in range(256):
        # class 0 holds values 0..t-1
        if t > 0:
            n0 += hist[t - 1]
            s0 += (t - 1) * hist[t - 1]
        n1 = total_n - n0
        if n0 == 0 or n1 == 0:
            continue
        s1 = total_s - s0
        # sigma_b^2 * N^2 == (s0*n1 - s1*n0)^2 / (n0*n1)
        num = (s0 * n1 - s1 * n0) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return OtsuResult(best_t, False)


def binarize(img: GrayRaster, method: str = "otsu", threshold: int = OTSU_FALLBACK) -> BinaryRaster:
    """White where intensity >= threshold.

    ``method`` is ``"otsu"`` or ``"fixed"``. Otsu on a single-valued image
    warns with :class:`DegenerateHistogram` and uses the fixed fallback.
    """
    if method == "otsu":
        res = otsu_threshold(img)
        if res.degenerate:
            warnings.warn(
                f"single-valued histogram, using fixed threshold {res.threshold}",
                DegenerateHistogram,
                stacklevel=2,
            )
        t = res.threshold
    elif method == "fixed":
        if not 0 <= threshold <= 255:
            raise ValueError("fixed threshold must be in [0, 255]")
        t = threshold
    else:
        raise ValueError(f"unknown binarize method {method!r}")
    return BinaryRaster(img.pixels >= t)


# -- components ------------------------------------------------------------


@dataclass(frozen=True)
class Component:
    label: int
    area: int
    # inclusive-exclusive pixel box: rows [top, bottom), cols [left, right)
    top: int
    left: int
    bottom: int
    right: int


@dataclass(frozen=True, eq=False)
class Components:
    labels: np.ndarray
    components: tuple[Component, ...]

    def __len__(self):
        return len(self.components)


_FOUR = ndimage.generate_binary_structure(2, 1)


def connected_components(img: BinaryRaster, foreground: bool = True) -> Components:
    """4-connected labeling of pixels equal to ``foreground``.

    Labels are dense from 1 in raster-scan order of each component's first
    pixel; 0 marks background.
    """
    mask = img.pixels if foreground else ~img.pixels
    labels, n = ndimage.label(mask, structure=_FOUR)
    labels.setflags(write=False)
    areas = np.bincount(labels.ravel(), minlength=n + 1)
    comps = []
    for i, sl in enumerate(ndimage.find_objects(labels), start=1):
        rows, cols = sl
        comps.append(Component(i, int(areas[i]), rows.start, cols.start, rows.stop, cols.stop))
    return Components(labels, tuple(comps))


def crop(img: Raster, top: int, left: int, bottom: int, right: int) -> Raster:
    return type(img)(img.pixels[top:bottom, left:right])


def crop_largest_dark_region(img: RgbRaster, dark_threshold: int = 64) -> RgbRaster:
    """Crop to the bounding box of the largest dark 4-connected region.

    Dark means grayscale intensity below ``dark_threshold``. Area ties go to
    the component found first in raster order.
    """
    dark = BinaryRaster(to_grayscale(img).pixels < dark_threshold)
    comps = connected_components(dark, foreground=True)
    if not comps.components:
        raise NoFieldFound(f"no pixel darker than {dark_threshold}")
    best = max(comps.components, key=lambda c: (c.area, -c.label))
    return crop(img, best.top, best.left, best.bottom, best.right)


# -- resampling ------------------------------------------------------------


def _axis_weights(n_in: int, n_out: int):
    x = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    x = np.clip(x, 0.0, n_in - 1)
    lo = np.floor(x).astype(int)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = x - lo
    return lo, hi, frac


def resize_bilinear(img: Raster, out_w: int, out_h: int) -> Raster:
    """Bilinear resampling with half-pixel-center alignment."""
    if out_w < 1 or out_h < 1:
        raise ValueError("output size must be at least 1x1")
    if (out_w, out_h) == (img.width, img.height):
        return img
    src = img.pixels.astype(float)
    r0, r1, fr = _axis_weights(img.height, out_h)
    c0, c1, fc = _axis_weights(img.width, out_w)
    if src.ndim == 3:
        fr = fr[:, None, None]
        fc = fc[None, :, None]
    else:
        fr = fr[:, None]
        fc = fc[None, :]
    top = src[r0][:, c0] * (1 - fc) + src[r0][:, c1] * fc
    bot = src[r1][:, c0] * (1 - fc) + src[r1][:, c1] * fc
    out = top * (1 - fr) + bot * fr
    return type(img)(to_u8(out))
