"""Grid path -> rotate / forward commands, plus a dead-reckoning executor.

Headings are compass degrees: 0 is north (decreasing row) and angles grow
clockwise. Rotations are signed, positive clockwise, in (-180, 180].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .mapper import GridSpec
from .planner import Cell, GridPath

SQRT2 = math.sqrt(2.0)

BEARINGS = {
    (-1, 0): 0,
    (-1, 1): 45,
    (0, 1): 90,
    (1, 1): 135,
    (1, 0): 180,
    (1, -1): 225,
    (0, -1): 270,
    (-1, -1): 315,
}


@dataclass(frozen=True)
class Pose:
    cell: Cell
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "cell", Cell(*self.cell))
        object.__setattr__(self, "heading", self.heading % 360.0)


@dataclass(frozen=True)
class NavCommand:
    kind: str  # "ROTATE" or "FORWARD"
    value: float
    # FORWARD bookkeeping: number of grid steps and whether they are diagonal
    steps: int = 0
    diagonal: bool = False

    def __str__(self):
        return f"{self.kind} {self.value:.3f}"


def rotate(degrees: float) -> NavCommand:
    return NavCommand("ROTATE", degrees)


def forward(cm: float, steps: int = 0, diagonal: bool = False) -> NavCommand:
    return NavCommand("FORWARD", cm, steps, diagonal)


def turn(from_heading: float, to_heading: float) -> float:
    """Minimal signed turn in (-180, 180]."""
    d = (to_heading - from_heading) % 360.0
    return d - 360.0 if d > 180.0 else d


def step_bearing(a, b) -> int:
    try:
        return BEARINGS[(b[0] - a[0], b[1] - a[1])]
    except KeyError:
        raise ValueError(f"{a} and {b} are not 8-neighbours") from None


def compile_commands(path: GridPath, spec: GridSpec, start: Pose) -> list[NavCommand]:
    """Rotate at every bearing change, merge collinear steps into one Forward.

    Paths shorter than two cells give an empty list.
    """
    cells = path.cells
    if cells and Cell(*cells[0]) != start.cell:
        raise ValueError(f"start pose {start.cell} is not the first path cell {cells[0]}")
    cmds: list[NavCommand] = []
    heading = start.heading
    run = 0
    run_bearing = None

    def flush():
        if run:
            diag = run_bearing % 90 != 0
            cm = run * spec.cell_cm * (SQRT2 if diag else 1.0)
            cmds.append(forward(cm, run, diag))

    for a, b in zip(cells, cells[1:]):
        bearing = step_bearing(a, b)
        if bearing != run_bearing:
            flush()
            run = 0
            delta = turn(heading, bearing)
            if delta != 0:
                cmds.append(rotate(delta))
            heading = bearing
            run_bearing = bearing
        run += 1
    flush()
    return cmds


class Position(NamedTuple):
    x: float
    y: float


def simulate_execution(cmds: list[NavCommand], start: Pose, spec: GridSpec) -> list[Position]:
    """Dead-reckon from the start cell center; one position per Forward, after the start."""
    x, y = spec.center_cm(start.cell)
    heading = start.heading
    out = [Position(x, y)]
    for cmd in cmds:
        if cmd.kind == "ROTATE":
            heading = (heading + cmd.value) % 360.0
        elif cmd.kind == "FORWARD":
            rad = math.radians(heading)
            x += cmd.value * math.sin(rad)
            y -= cmd.value * math.cos(rad)
            out.append(Position(x, y))
        else:
            raise ValueError(f"unknown command kind {cmd.kind!r}")
    return out


def final_heading(cmds: list[NavCommand], start: Pose) -> float:
    h = start.heading
    for cmd in cmds:
        if cmd.kind == "ROTATE":
            h = (h + cmd.value) % 360.0
    return h


def format_commands(cmds: list[NavCommand]) -> str:
    return "".join(f"{c}\n" for c in cmds)


def parse_commands(text: str) -> list[NavCommand]:
    cmds = []
    for line in text.splitlines():
        if not line.strip():
            continue
        kind, value = line.split()
        if kind not in ("ROTATE", "FORWARD"):
            raise ValueError(f"unknown command {kind!r}")
        cmds.append(NavCommand(kind, float(value)))
    return cmds
