"""Synthetic ground truth: a smooth moisture surface, the rhombus field layout,
and renderers for the aerial view and for close-up soil images.

Coordinates are field centimeters with the origin at the top-left corner,
x to the right and y downward (matching grid rows/cols).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from . import raster as rc
from .calibration import PolynomialModel, invert_calibration
from .estimator import soil_rgb

SOIL_DARK = (58, 40, 26)
PATH_WHITE = (235, 235, 235)
BACKGROUND = (190, 190, 190)
FRAME_BLACK = (0, 0, 0)


class Bump(NamedTuple):
    x: float
    y: float
    amplitude: float  # percent
    radius: float  # cm, Gaussian sigma


@dataclass(frozen=True)
class MoistureField:
    width_cm: float = 200.0
    height_cm: float = 160.0
    base: float = 38.0
    bumps: tuple[Bump, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(Bump(*b) for b in self.bumps))
        for b in self.bumps:
            if not b.radius > 0:
                raise ValueError("bump radius must be positive")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        f = np.full(np.broadcast(x, y).shape, float(self.base))
        for b in self.bumps:
            d2 = (x - b.x) ** 2 + (y - b.y) ** 2
            f = f + b.amplitude * np.exp(-d2 / (2.0 * b.radius * b.radius))
        out = np.clip(f, 0.0, 100.0)
        return float(out) if out.ndim == 0 else out

    @property
    def lipschitz_bound(self) -> float:
        """Upper bound on |grad f|: each bump contributes |a| / (r sqrt(e))."""
        return sum(abs(b.amplitude) / (b.radius * math.sqrt(math.e)) for b in self.bumps)

    def with_bumps(self, extra: Sequence[Bump]) -> "MoistureField":
        return replace(self, bumps=self.bumps + tuple(extra))


def synth_field(
    width_cm: float = 200.0,
    height_cm: float = 160.0,
    base: float = 38.0,
    bumps: Sequence[Bump] = (),
    n_random: int = 0,
    amplitude: tuple[float, float] = (-8.0, 8.0),
    radius: tuple[float, float] = (25.0, 60.0),
    seed: int = 0,
) -> MoistureField:
    """Gaussian-sum field; ``n_random`` extra bumps are drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    extra = []
    for _ in range(n_random):
        extra.append(
            Bump(
                float(rng.uniform(0, width_cm)),
                float(rng.uniform(0, height_cm)),
                float(rng.uniform(*amplitude)),
                float(rng.uniform(*radius)),
            )
        )
    return MoistureField(width_cm, height_cm, base, tuple(bumps) + tuple(extra), seed)


# -- geometry -----------------------------------------------------------------


def points_in_polygon(poly: Sequence[tuple[float, float]], x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Even-odd ray casting, vectorized over points."""
    inside = np.zeros(np.broadcast(x, y).shape, dtype=bool)
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < xint)
    return inside


def distance_to_segments(segments, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    best = np.full(np.broadcast(x, y).shape, np.inf)
    for (x1, y1), (x2, y2) in segments:
        dx, dy = x2 - x1, y2 - y1
        t = ((x - x1) * dx + (y - y1) * dy) / (dx * dx + dy * dy)
        t = np.clip(t, 0.0, 1.0)
        d = np.hypot(x - (x1 + t * dx), y - (y1 + t * dy))
        best = np.minimum(best, d)
    return best


@dataclass(frozen=True)
class Region:
    """A subfield: polygon minus a keep-out band around the path centreline."""

    id: int
    polygon: tuple[tuple[float, float], ...]
    path: tuple[tuple[tuple[float, float], tuple[float, float]], ...] = ()
    path_half_width: float = 0.0

    def contains(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = points_in_polygon(self.polygon, x, y)
        if self.path:
            inside &= distance_to_segments(self.path, x, y) > self.path_half_width
        return inside

    @property
    def centroid(self) -> tuple[float, float]:
        """Area centroid of the polygon (shoelace)."""
        pts = self.polygon
        a = cx = cy = 0.0
        for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
            cross = x1 * y2 - x2 * y1
            a += cross
            cx += (x1 + x2) * cross
            cy += (y1 + y2) * cross
        a *= 0.5
        return cx / (6 * a), cy / (6 * a)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.polygon]
        ys = [p[1] for p in self.polygon]
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class Layout:
    width_cm: float
    height_cm: float
    path_width_cm: float
    regions: tuple[Region, ...]
    path: tuple

    def path_mask(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        on_field = (x >= 0) & (x <= self.width_cm) & (y >= 0) & (y <= self.height_cm)
        return on_field & (distance_to_segments(self.path, x, y) <= self.path_width_cm / 2.0)

    def region(self, rid: int) -> Region:
        for r in self.regions:
            if r.id == rid:
                return r
        raise KeyError(rid)


def rhombus_layout(width_cm: float = 200.0, height_cm: float = 160.0, path_width_cm: float = 25.0) -> Layout:
    """A rhombus path through the side midpoints, cutting the field into five.

    Regions 1-4 are the corner triangles (clockwise from top-left), region 5
    is the rhombus interior.
    """
    w, h = float(width_cm), float(height_cm)
    top, right, bottom, left = (w / 2, 0.0), (w, h / 2), (w / 2, h), (0.0, h / 2)
    path = ((top, right), (right, bottom), (bottom, left), (left, top))
    polys = (
        ((0.0, 0.0), top, left),
        (top, (w, 0.0), right),
        (right, (w, h), bottom),
        (bottom, (0.0, h), left),
        (top, right, bottom, left),
    )
    half = path_width_cm / 2.0
    regions = tuple(Region(i + 1, p, path, half) for i, p in enumerate(polys))
    return Layout(w, h, float(path_width_cm), regions, path)


# -- rendering ----------------------------------------------------------------


def _pixel_centers(x0: float, y0: float, w_px: int, h_px: int, px_per_cm: float):
    xs = x0 + (np.arange(w_px) + 0.5) / px_per_cm
    ys = y0 + (np.arange(h_px) + 0.5) / px_per_cm
    return np.meshgrid(xs, ys)


def path_pixel_mask(layout: Layout, px_per_cm: float) -> np.ndarray:
    """Boolean (h, w) mask of path pixels at the aerial resolution."""
    w_px = round(layout.width_cm * px_per_cm)
    h_px = round(layout.height_cm * px_per_cm)
    x, y = _pixel_centers(0.0, 0.0, w_px, h_px, px_per_cm)
    return layout.path_mask(x, y)


def render_aerial(layout: Layout, px_per_cm: float = 2.0, frame_px: int = 2, margin_px: int = 20) -> rc.RgbRaster:
    """Top-camera view: dark soil, white path, black frame, grey surroundings."""
    path = path_pixel_mask(layout, px_per_cm)
    h_px, w_px = path.shape
    field = np.empty((h_px, w_px, 3), dtype=np.uint8)
    field[:] = SOIL_DARK
    field[path] = PATH_WHITE
    if frame_px:
        field[:frame_px] = FRAME_BLACK
        field[-frame_px:] = FRAME_BLACK
        field[:, :frame_px] = FRAME_BLACK
        field[:, -frame_px:] = FRAME_BLACK
    img = np.empty((h_px + 2 * margin_px, w_px + 2 * margin_px, 3), dtype=np.uint8)
    img[:] = BACKGROUND
    img[margin_px : margin_px + h_px, margin_px : margin_px + w_px] = field
    return rc.RgbRaster(img)


def _dither(values: np.ndarray) -> np.ndarray:
    """Round a 1-D sequence so running sums stay within 0.5 of the exact ones."""
    s = np.floor(np.cumsum(values) + 0.5)
    return np.diff(np.concatenate([[0.0], s]))


@dataclass(frozen=True)
class SoilCamera:
    """Synthetic close-up camera.

    ``texture`` is the half-width of a seeded per-pixel brightness jitter
    (V multiplied by a factor in [1 - texture, 1 + texture]). Perfectly flat
    synthetic soil would make 8-bit rounding errors systematic after any
    global brightness change; real soil never looks like that.
    """

    px_per_cm: float = 1.0
    exposure: float = 0.65
    target_v: float = 0.5
    texture: float = 0.15

    def __post_init__(self):
        if not 0 <= self.texture < 1:
            raise ValueError("texture must be in [0, 1)")
        if not 0 < self.exposure * (1 + self.texture) <= 1:
            raise ValueError("exposure * (1 + texture) must lie in (0, 1]")


def render_subfield_image(
    field: MoistureField,
    region: Region,
    model: PolynomialModel,
    noise_sigma: float = 0.0,
    seed: int = 0,
    camera: SoilCamera = SoilCamera(),
) -> rc.RgbRaster:
    """Close-up image of a subfield whose estimate inverts back to the field.

    Each soil pixel's target gray is the calibration inverse of the local
    moisture plus seeded Gaussian noise (gray levels). Pixels outside the
    region are painted path white, which the sand mask rejects.
    """
    x0, y0, x1, y1 = region.bbox
    w_px = math.ceil((x1 - x0) * camera.px_per_cm)
    h_px = math.ceil((y1 - y0) * camera.px_per_cm)
    if w_px < 1 or h_px < 1:
        raise ValueError(f"region {region.id} has zero area")
    x, y = _pixel_centers(x0, y0, w_px, h_px, camera.px_per_cm)
    inside = region.contains(x, y)
    if not inside.any():
        raise ValueError(f"region {region.id} has zero area")

    moisture = np.asarray(field(x[inside], y[inside]), dtype=float).ravel()
    gray = np.array([invert_calibration(model, float(m)) for m in moisture])
    rng = np.random.default_rng(seed)
    shade = rng.uniform(1.0 - camera.texture, 1.0 + camera.texture, gray.shape)
    if noise_sigma > 0:
        gray = gray + rng.normal(0.0, noise_sigma, gray.shape)
    # a common gain per pixel leaves hue and saturation, hence normalized gray, alone
    rgb = soil_rgb(gray, camera.target_v, camera.exposure) * shade[:, None]
    quantized = np.stack([_dither(rgb[:, ch]) for ch in range(3)], axis=-1)

    img = np.empty((h_px, w_px, 3), dtype=np.uint8)
    img[:] = PATH_WHITE
    img[inside] = np.clip(quantized, 0, 255).astype(np.uint8)
    return rc.RgbRaster(img)


def region_mean(field: MoistureField, region: Region, step_cm: float = 0.25) -> float:
    """Mean moisture over the region by midpoint-rule integration."""
    x0, y0, x1, y1 = region.bbox
    xs = np.arange(x0 + step_cm / 2, x1, step_cm)
    ys = np.arange(y0 + step_cm / 2, y1, step_cm)
    x, y = np.meshgrid(xs, ys)
    inside = region.contains(x, y)
    return float(np.mean(field(x[inside], y[inside])))
