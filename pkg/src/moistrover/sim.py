"""Monitor -> alarm -> dispatch -> plan -> inspect -> report loop.

Each tick every sensor samples the ground truth and sends a frame over the
simulated link. A sensor whose reading is below the alarm threshold raises an
ALARM every tick until its subfield has been inspected; it re-arms once the
reading recovers. At most one subfield is dispatched per tick (one robot),
lowest reading first, ties to the lowest sensor id.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import link
from .errors import MoistRoverError, ScenarioError, Unreachable
from .estimator import MoistureEstimate, estimate_moisture
from .field import Region, render_aerial, render_subfield_image
from .mapper import OccupancyGrid, preprocess_field
from .nav import NavCommand, Pose, compile_commands, final_heading
from .planner import Cell, GridPath, shortest_path
from .raster import RgbRaster
from .scenario import Scenario

log = logging.getLogger(__name__)

KINDS = ("SAMPLE", "ALARM", "DISPATCH", "PATH", "INSPECT", "ESTIMATE", "REPORT")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.3f}"
    text = str(value)
    return f'"{text}"' if " " in text else text


class Event(NamedTuple):
    tick: int
    kind: str
    payload: tuple[tuple[str, str], ...]

    def __str__(self):
        fields_ = " ".join(f"{k}={v}" for k, v in self.payload)
        return f"tick={self.tick} kind={self.kind} {fields_}".rstrip()

    def get(self, key: str) -> str:
        return dict(self.payload)[key]


@dataclass
class EventLog:
    events: list[Event] = field(default_factory=list)

    def add(self, tick: int, kind: str, **payload) -> Event:
        if kind not in KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        ev = Event(tick, kind, tuple((k, _fmt(v)) for k, v in payload.items()))
        self.events.append(ev)
        return ev

    def of_kind(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def format(self) -> str:
        return "".join(f"{e}\n" for e in self.events)


@dataclass(frozen=True)
class Inspection:
    tick: int
    subfield: int
    path: GridPath
    commands: tuple[NavCommand, ...]
    image: RgbRaster
    estimate: MoistureEstimate


def nearest_free_cell(grid: OccupancyGrid, x_cm: float, y_cm: float) -> Cell:
    """Navigable cell whose center is closest to a field point (ties: lowest row, col)."""
    best = None
    for r, c in grid.free_cells():
        cx, cy = grid.spec.center_cm((r, c))
        key = (math.hypot(cx - x_cm, cy - y_cm), r, c)
        if best is None or key < best:
            best = key
    if best is None:
        raise ScenarioError("occupancy grid has no navigable cell")
    return Cell(best[1], best[2])


class Simulation:
    def __init__(self, scenario: Scenario):
        scenario.validate()
        self.scenario = scenario
        self.layout = scenario.layout()
        self.aerial = render_aerial(self.layout, scenario.aerial_px_per_cm)
        # the aerial view is processed once, not every tick
        self.grid = preprocess_field(self.aerial, scenario.mapper)
        self.sensors = scenario.sensor_positions()
        self.inspection_cells = {
            r.id: nearest_free_cell(self.grid, *r.centroid) for r in self.layout.regions
        }
        if scenario.start is None:
            start = nearest_free_cell(self.grid, 0.0, scenario.height_cm / 2)
        else:
            start = Cell(*scenario.start)
            if not self.grid.is_free(start):
                raise ScenarioError(f"robot start {start} is not a navigable cell")
        self.pose = Pose(start, scenario.heading)
        self.acknowledged = {r.id: False for r in self.layout.regions}
        self.log = EventLog()
        self.inspections: list[Inspection] = []
        self._rng = np.random.default_rng(scenario.seed)

    def region(self, rid: int) -> Region:
        return self.layout.region(rid)

    def _sample(self, tick: int, truth) -> dict[int, link.SensorReading]:
        sc = self.scenario
        readings = {}
        for rid, (x, y) in zip((r.id for r in self.layout.regions), self.sensors):
            volts = sc.moisture_map.voltage_for(truth(x, y))
            if sc.sensor_sigma > 0:
                volts += float(self._rng.normal(0.0, sc.sensor_sigma))
            volts = min(max(volts, 0.0), sc.adc.v_sensor_max)
            frame = link.encode_frame(sc.adc, rid, tick & 0xFFFF, volts)
            reading = link.decode_frame(sc.adc, frame, sc.moisture_map)
            readings[rid] = reading
            self.log.add(
                tick,
                "SAMPLE",
                sensor=rid,
                seq=reading.sequence,
                voltage=reading.voltage,
                moisture=reading.moisture,
                frame=link.hexdump(frame),
            )
        return readings

    def step(self, tick: int) -> None:
        sc = self.scenario
        truth = sc.ground_truth(tick)
        readings = self._sample(tick, truth)

        alarmed = []
        for rid, reading in readings.items():
            if reading.moisture >= sc.alarm_threshold:
                self.acknowledged[rid] = False
            elif not self.acknowledged[rid]:
                alarmed.append(rid)
                self.log.add(tick, "ALARM", sensor=rid, moisture=reading.moisture, threshold=sc.alarm_threshold)
        if not alarmed:
            return
        target = min(alarmed, key=lambda rid: (readings[rid].moisture, rid))
        self.acknowledged[target] = True
        self._inspect(tick, target, truth)

    def _inspect(self, tick: int, rid: int, truth) -> None:
        sc = self.scenario
        dest = self.inspection_cells[rid]
        self.log.add(tick, "DISPATCH", subfield=rid, sensor=rid, src=self.pose.cell, dst=dest)
        try:
            path = shortest_path(self.grid, self.pose.cell, dest)
        except Unreachable:
            self.log.add(tick, "REPORT", subfield=rid, status="unreachable", threshold=sc.alarm_threshold)
            return
        cmds = compile_commands(path, self.grid.spec, self.pose)
        self.log.add(tick, "PATH", subfield=rid, steps=path.steps, commands=len(cmds), cells=str(path))
        self.pose = Pose(dest, final_heading(cmds, self.pose))

        seed = int(np.random.SeedSequence([sc.seed, tick, rid]).generate_state(1)[0])
        region = self.region(rid)
        try:
            image = render_subfield_image(truth, region, sc.model, sc.image_sigma, seed, sc.camera)
            self.log.add(tick, "INSPECT", subfield=rid, cell=dest, width=image.width, height=image.height, seed=seed)
            est = estimate_moisture(image, sc.model, sc.estimator)
        except MoistRoverError as exc:
            self.log.add(
                tick, "REPORT", subfield=rid, status="failed", reason=type(exc).__name__, threshold=sc.alarm_threshold
            )
            return
        self.log.add(
            tick,
            "ESTIMATE",
            subfield=rid,
            moisture=est.moisture,
            avg_gray=est.avg_gray,
            kept_fraction=est.kept_fraction,
            clamped=est.clamped,
        )
        status = "confirmed_dry" if est.moisture < sc.alarm_threshold else "false_alarm"
        self.log.add(
            tick, "REPORT", subfield=rid, status=status, estimate=est.moisture, threshold=sc.alarm_threshold
        )
        self.inspections.append(Inspection(tick, rid, path, tuple(cmds), image, est))
        log.info("tick %d: subfield %d %s (%.3f%%)", tick, rid, status, est.moisture)

    def run(self, ticks: int) -> EventLog:
        for tick in range(ticks):
            self.step(tick)
        return self.log


def run(scenario: Scenario, ticks: int) -> EventLog:
    return Simulation(scenario).run(ticks)
