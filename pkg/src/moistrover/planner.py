"""Net-distance labeling and shortest paths on an occupancy grid.

With unit edge weights Dijkstra reduces to a breadth-first sweep, so the
labeling is a plain BFS over 8 (or 4) neighbours. The path is recovered by
walking back from the destination through cells whose net distance drops by
exactly one, trying neighbours clockwise from north.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import SourceBlocked, Unreachable
from .mapper import OccupancyGrid

UNREACHED = -1


class Cell(NamedTuple):
    row: int
    col: int

    def __str__(self):
        return f"{self.row},{self.col}"


# N, NE, E, SE, S, SW, W, NW
DIRECTIONS = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


@dataclass(frozen=True)
class Connectivity:
    eight: bool = True
    corner_cutting: bool = True

    def moves(self, grid: OccupancyGrid, cell):
        """Neighbours reachable in one step, in N..NW order."""
        nav = grid.navigable
        yield from self._moves(nav.tolist(), nav.shape[0], nav.shape[1], cell[0], cell[1])

    def _moves(self, nav: list, rows: int, cols: int, r: int, c: int):
        for dr, dc in DIRECTIONS:
            diag = dr != 0 and dc != 0
            if diag and not self.eight:
                continue
            nr, nc = r + dr, c + dc
            if not (0 <= nr < rows and 0 <= nc < cols) or not nav[nr][nc]:
                continue
            # squeezing between two diagonally-touching blocked cells
            if diag and not self.corner_cutting and not nav[r][nc] and not nav[nr][c]:
                continue
            yield Cell(nr, nc)


EIGHT = Connectivity()


@dataclass(frozen=True, eq=False)
class NetDistanceField:
    source: Cell
    dist: np.ndarray  # int, UNREACHED where not reached
    connectivity: Connectivity = EIGHT

    def reached(self, cell) -> bool:
        r, c = cell
        return 0 <= r < self.dist.shape[0] and 0 <= c < self.dist.shape[1] and self.dist[r, c] != UNREACHED

    def __getitem__(self, cell) -> int | None:
        d = int(self.dist[cell[0], cell[1]])
        return None if d == UNREACHED else d

    def format(self) -> str:
        """Rows of space-separated distances, ``-`` for unreached cells."""
        return "\n".join(" ".join("-" if d == UNREACHED else str(d) for d in row) for row in self.dist.tolist())


@dataclass(frozen=True)
class GridPath:
    cells: tuple[Cell, ...]

    def __len__(self):
        return len(self.cells)

    @property
    def steps(self) -> int:
        return len(self.cells) - 1

    def __str__(self):
        return "->".join(str(c) for c in self.cells)

    @classmethod
    def parse(cls, text: str) -> "GridPath":
        cells = []
        for tok in text.strip().split("->"):
            r, c = tok.split(",")
            cells.append(Cell(int(r), int(c)))
        return cls(tuple(cells))


def label_net_distances(grid: OccupancyGrid, source, connectivity: Connectivity = EIGHT) -> NetDistanceField:
    source = Cell(*source)
    if not grid.spec.in_bounds(source):
        raise IndexError(f"source {source} outside {grid.shape[0]}x{grid.shape[1]} grid")
    if not grid.navigable[source]:
        raise SourceBlocked(f"source {source} is not navigable")
    rows, cols = grid.shape
    nav = grid.navigable.tolist()
    # plain lists: per-element numpy indexing dominates otherwise
    dist = [[UNREACHED] * cols for _ in range(rows)]
    dist[source.row][source.col] = 0
    frontier = deque([source])
    while frontier:
        r, c = frontier.popleft()
        d = dist[r][c] + 1
        for nb in connectivity._moves(nav, rows, cols, r, c):
            if dist[nb.row][nb.col] == UNREACHED:
                dist[nb.row][nb.col] = d
                frontier.append(nb)
    out = np.array(dist, dtype=int)
    out.setflags(write=False)
    return NetDistanceField(source, out, connectivity)


def backtrack_path(field: NetDistanceField, grid: OccupancyGrid, dest) -> GridPath:
    dest = Cell(*dest)
    if not grid.spec.in_bounds(dest):
        raise IndexError(f"destination {dest} outside grid")
    if not field.reached(dest):
        raise Unreachable(f"{dest} is not reachable from {field.source}")
    rows, cols = grid.shape
    nav = grid.navigable.tolist()
    dist = field.dist.tolist()
    cells = [dest]
    cur = dest
    while dist[cur.row][cur.col] > 0:
        want = dist[cur.row][cur.col] - 1
        moves = field.connectivity._moves(nav, rows, cols, cur.row, cur.col)
        cur = next(nb for nb in moves if dist[nb.row][nb.col] == want)
        cells.append(cur)
    return GridPath(tuple(reversed(cells)))


def shortest_path(grid: OccupancyGrid, src, dst, connectivity: Connectivity = EIGHT) -> GridPath:
    dst = Cell(*dst)
    if not grid.spec.in_bounds(dst):
        raise IndexError(f"destination {dst} outside grid")
    field = label_net_distances(grid, src, connectivity)
    return backtrack_path(field, grid, dst)
