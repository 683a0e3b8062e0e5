"""Paint a planned path onto the processed field image."""

from __future__ import annotations

import numpy as np

from .mapper import GridSpec
from .planner import GridPath
from .raster import RgbRaster

PATH_TINT = (255, 220, 0)
SOURCE = (0, 200, 0)
DEST = (220, 0, 0)
LINE = (0, 0, 160)


def _blend(block: np.ndarray, color, alpha: float) -> np.ndarray:
    return np.round(block * (1 - alpha) + np.asarray(color, dtype=float) * alpha)


def _line(x0: int, y0: int, x1: int, y1: int):
    """Bresenham pixels from (x0, y0) to (x1, y1), inclusive."""
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx, sy = (1 if x1 > x0 else -1), (1 if y1 > y0 else -1)
    err = dx + dy
    while True:
        yield x0, y0
        if (x0, y0) == (x1, y1):
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def render_overlay(base: RgbRaster, spec: GridSpec, path: GridPath) -> RgbRaster:
    """Tint path cells, mark source green and destination red, and draw a
    solid line through the cell centers. Only path cells are touched."""
    if (base.width, base.height) != (spec.width_px, spec.height_px):
        raise ValueError("overlay base does not match the grid")
    px = base.pixels.astype(float)
    k = spec.cell_px
    cells = path.cells
    for i, (r, c) in enumerate(cells):
        block = px[r * k : (r + 1) * k, c * k : (c + 1) * k]
        color, alpha = PATH_TINT, 0.5
        if i == 0:
            color, alpha = SOURCE, 0.7
        elif i == len(cells) - 1:
            color, alpha = DEST, 0.7
        block[:] = _blend(block, color, alpha)
    on_path = {(int(r), int(c)) for r, c in cells}
    centers = [(c * k + k // 2, r * k + k // 2) for r, c in cells]
    for (x0, y0), (x1, y1) in zip(centers, centers[1:]):
        for x, y in _line(x0, y0, x1, y1):
            # a diagonal step grazes the shared corner of two off-path cells
            if (y // k, x // k) in on_path:
                px[y, x] = LINE
    # single-cell paths still get a visible mark
    for x, y in centers:
        px[y, x] = LINE
    return RgbRaster(px.astype(np.uint8))


def painted_cells(base: RgbRaster, overlay: RgbRaster, spec: GridSpec) -> set[tuple[int, int]]:
    diff = np.any(base.pixels != overlay.pixels, axis=-1)
    k = spec.cell_px
    per_cell = diff.reshape(spec.rows, k, spec.cols, k).any(axis=(1, 3))
    return {(int(r), int(c)) for r, c in zip(*np.nonzero(per_cell))}
