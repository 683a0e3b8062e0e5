"""Aerial field raster -> occupancy grid.

Cells are addressed ``(row, col)`` from the top-left corner of the cropped,
resized field image.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import raster as rc
from .errors import DimensionMismatch

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    rows: int
    cols: int
    cell_px: int
    cm_per_px: float

    def __post_init__(self):
        if min(self.rows, self.cols, self.cell_px) < 1:
            raise ValueError("rows, cols and cell_px must be >= 1")
        if not self.cm_per_px > 0:
            raise ValueError("cm_per_px must be positive")

    @property
    def cell_cm(self) -> float:
        return self.cell_px * self.cm_per_px

    @property
    def width_px(self) -> int:
        return self.cols * self.cell_px

    @property
    def height_px(self) -> int:
        return self.rows * self.cell_px

    def center_cm(self, cell) -> tuple[float, float]:
        """(x, y) of a cell center in field centimeters, y growing downward."""
        r, c = cell
        return (c + 0.5) * self.cell_cm, (r + 0.5) * self.cell_cm

    def in_bounds(self, cell) -> bool:
        r, c = cell
        return 0 <= r < self.rows and 0 <= c < self.cols


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    spec: GridSpec
    navigable: np.ndarray  # (rows, cols) bool
    white_fraction: np.ndarray  # (rows, cols) float
    threshold: float = 0.5

    def __post_init__(self):
        for name in ("navigable", "white_fraction"):
            a = np.array(getattr(self, name), copy=True)
            if a.shape != (self.spec.rows, self.spec.cols):
                raise ValueError(f"{name} shape {a.shape} does not match spec")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_mask(cls, mask, cell_px: int = 1, cm_per_px: float = 1.0) -> "OccupancyGrid":
        """Grid straight from a boolean navigability mask (handy for planning tests)."""
        mask = np.asarray(mask, dtype=bool)
        spec = GridSpec(mask.shape[0], mask.shape[1], cell_px, cm_per_px)
        return cls(spec, mask, mask.astype(float), 0.5)

    @property
    def shape(self) -> tuple[int, int]:
        return self.spec.rows, self.spec.cols

    def is_free(self, cell) -> bool:
        return self.spec.in_bounds(cell) and bool(self.navigable[cell[0], cell[1]])

    def free_cells(self) -> list[tuple[int, int]]:
        return [(int(r), int(c)) for r, c in zip(*np.nonzero(self.navigable))]

    def white_count(self, cell) -> Fraction:
        """Exact white fraction as a rational k / cell_px**2."""
        r, c = cell
        n = self.spec.cell_px**2
        return Fraction(round(float(self.white_fraction[r, c]) * n), n)


def build_occupancy(img: rc.BinaryRaster, spec: GridSpec, white_threshold: float = 0.5) -> OccupancyGrid:
    if not 0 < white_threshold <= 1:
        raise ValueError("white_threshold must be in (0, 1]")
    if (img.width, img.height) != (spec.width_px, spec.height_px):
        raise DimensionMismatch(
            f"raster is {img.width}x{img.height} px, grid needs {spec.width_px}x{spec.height_px}"
        )
    k = spec.cell_px
    counts = img.pixels.reshape(spec.rows, k, spec.cols, k).sum(axis=(1, 3))
    fraction = counts / float(k * k)
    return OccupancyGrid(spec, fraction >= white_threshold, fraction, white_threshold)


@dataclass(frozen=True)
class MapperConfig:
    dark_threshold: int = 64
    resize_w: int = 400
    resize_h: int = 320
    cell_px: int = 20
    cm_per_px: float = 0.5
    sigma: float = 1.0
    binarize: str = "otsu"
    fixed_threshold: int = 128
    white_threshold: float = 0.5
    robot_footprint_cm: float = 10.0

    def grid_spec(self) -> GridSpec:
        if self.resize_w % self.cell_px or self.resize_h % self.cell_px:
            raise DimensionMismatch(
                f"resize target {self.resize_w}x{self.resize_h} is not a multiple of cell_px={self.cell_px}"
            )
        return GridSpec(self.resize_h // self.cell_px, self.resize_w // self.cell_px, self.cell_px, self.cm_per_px)


class FootprintWarning(UserWarning):
    """A grid cell is smaller than the robot."""


def preprocess_field(img: rc.RgbRaster, cfg: MapperConfig = MapperConfig()) -> OccupancyGrid:
    """crop -> resize -> grayscale -> blur -> binarize -> per-cell white fraction."""
    spec = cfg.grid_spec()
    if spec.cell_cm < cfg.robot_footprint_cm:
        warnings.warn(
            f"cell side {spec.cell_cm:.3f} cm is smaller than the robot footprint "
            f"{cfg.robot_footprint_cm:.3f} cm",
            FootprintWarning,
            stacklevel=2,
        )
    field = rc.crop_largest_dark_region(img, cfg.dark_threshold)
    field = rc.resize_bilinear(field, cfg.resize_w, cfg.resize_h)
    gray = rc.gaussian_blur(rc.to_grayscale(field), cfg.sigma)
    binary = rc.binarize(gray, cfg.binarize, cfg.fixed_threshold)
    grid = build_occupancy(binary, spec, cfg.white_threshold)
    log.debug("occupancy grid %dx%d, %d navigable", spec.rows, spec.cols, int(grid.navigable.sum()))
    return grid


def processed_field(img: rc.RgbRaster, cfg: MapperConfig = MapperConfig()) -> rc.RgbRaster:
    """The cropped and resized RGB field image that the grid is aligned to."""
    field = rc.crop_largest_dark_region(img, cfg.dark_threshold)
    return rc.resize_bilinear(field, cfg.resize_w, cfg.resize_h)
