"""Scenario configuration and its ``key = value`` / ``[section]`` file format.

Sections: field, sensors, robot, alarm, mapper, estimator, link, noise. Every
key is optional; omitted keys take the defaults below.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

from .calibration import PUBLISHED, PolynomialModel, load_model
from .errors import ParseError, ScenarioError
from .estimator import EstimatorConfig, HsvRange
from .field import Bump, Layout, MoistureField, SoilCamera, rhombus_layout
from .link import AdcModel, MoistureMap
from .mapper import MapperConfig

SECTIONS = ("field", "sensors", "robot", "alarm", "mapper", "estimator", "link", "noise")


class DrySpell(NamedTuple):
    """A negative (or positive) Gaussian bump that switches on at ``tick``."""

    tick: int
    bump: Bump


DEFAULT_BUMPS = (Bump(150.0, 40.0, 6.0, 50.0), Bump(60.0, 120.0, -5.0, 45.0))


@dataclass(frozen=True)
class Scenario:
    width_cm: float = 200.0
    height_cm: float = 160.0
    path_width_cm: float = 25.0
    aerial_px_per_cm: float = 2.0
    base: float = 38.0
    bumps: tuple[Bump, ...] = DEFAULT_BUMPS
    dry_spells: tuple[DrySpell, ...] = ()
    sensors: tuple[tuple[float, float], ...] = ()  # empty: one per region centroid
    start: tuple[int, int] | None = None  # empty: navigable cell nearest the west vertex
    heading: float = 90.0
    alarm_threshold: float = 25.0
    mapper: MapperConfig = field(default_factory=MapperConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    model: PolynomialModel = PUBLISHED
    camera: SoilCamera = field(default_factory=SoilCamera)
    adc: AdcModel = field(default_factory=AdcModel)
    moisture_map: MoistureMap = field(default_factory=MoistureMap)
    image_sigma: float = 1.0
    sensor_sigma: float = 0.0
    seed: int = 7

    def layout(self) -> Layout:
        return rhombus_layout(self.width_cm, self.height_cm, self.path_width_cm)

    def ground_truth(self, tick: int | None = None) -> MoistureField:
        """The moisture field, including dry spells active at ``tick``."""
        f = MoistureField(self.width_cm, self.height_cm, self.base, self.bumps, self.seed)
        if tick is None:
            return f
        return f.with_bumps([d.bump for d in self.dry_spells if d.tick <= tick])

    def sensor_positions(self) -> tuple[tuple[float, float], ...]:
        if self.sensors:
            return self.sensors
        return tuple(r.centroid for r in self.layout().regions)

    def validate(self) -> None:
        if not 0 < self.alarm_threshold < 100:
            raise ScenarioError(f"alarm threshold {self.alarm_threshold} not in (0, 100)")
        layout = self.layout()
        positions = self.sensor_positions()
        if len(positions) != len(layout.regions):
            raise ScenarioError(f"{len(positions)} sensors for {len(layout.regions)} subfields")
        for region, (x, y) in zip(layout.regions, positions):
            if not region.contains(x, y):
                raise ScenarioError(f"sensor {region.id} at ({x:.3f}, {y:.3f}) lies outside subfield {region.id}")
        m = self.mapper
        covered = (m.resize_w * m.cm_per_px, m.resize_h * m.cm_per_px)
        if abs(covered[0] - self.width_cm) > 1e-6 or abs(covered[1] - self.height_cm) > 1e-6:
            raise ScenarioError(
                f"mapper covers {covered[0]:.3f}x{covered[1]:.3f} cm, field is "
                f"{self.width_cm:.3f}x{self.height_cm:.3f} cm"
            )


# -- parsing ------------------------------------------------------------------


def _floats(text: str, n: int | None = None) -> tuple[float, ...]:
    vals = tuple(float(v) for v in text.split(","))
    if n is not None and len(vals) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _records(text: str, n: int) -> list[tuple[float, ...]]:
    return [_floats(part, n) for part in text.split(";") if part.strip()]


def _typed(cls, section: configparser.SectionProxy, skip=()):
    """Build a flat dataclass from a section, converting by the default's type."""
    kwargs = {}
    for f in fields(cls):
        if f.name in skip or f.name not in section:
            continue
        raw = section[f.name]
        default = f.default
        if isinstance(default, bool):
            kwargs[f.name] = section.getboolean(f.name)
        elif isinstance(default, int):
            kwargs[f.name] = int(raw)
        elif isinstance(default, float):
            kwargs[f.name] = float(raw)
        else:
            kwargs[f.name] = raw.strip()
    return cls(**kwargs)


def parse_scenario(text: str, base_dir: str | os.PathLike = ".") -> Scenario:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";;"), interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"scenario: {exc}") from None
    unknown = set(cp.sections()) - set(SECTIONS)
    if unknown:
        raise ParseError(f"scenario: unknown section(s) {sorted(unknown)}")
    for name in SECTIONS:
        if not cp.has_section(name):
            cp.add_section(name)

    try:
        kw: dict = {}
        f = cp["field"]
        for key in ("width_cm", "height_cm", "path_width_cm", "aerial_px_per_cm", "base"):
            if key in f:
                kw[key] = float(f[key])
        if "bumps" in f:
            kw["bumps"] = tuple(Bump(*r) for r in _records(f["bumps"], 4))
        if "dry_spells" in f:
            kw["dry_spells"] = tuple(
                DrySpell(int(r[0]), Bump(*r[1:])) for r in _records(f["dry_spells"], 5)
            )

        s = cp["sensors"]
        if "positions" in s:
            kw["sensors"] = tuple(tuple(r) for r in _records(s["positions"], 2))

        r = cp["robot"]
        if "start" in r:
            row, col = (int(v) for v in r["start"].split(","))
            kw["start"] = (row, col)
        if "heading" in r:
            kw["heading"] = float(r["heading"])

        if "threshold" in cp["alarm"]:
            kw["alarm_threshold"] = float(cp["alarm"]["threshold"])

        kw["mapper"] = _typed(MapperConfig, cp["mapper"])

        e = cp["estimator"]
        kw["estimator"] = estimator_config(e)
        if "model" in e:
            kw["model"] = load_model(os.path.join(base_dir, e["model"]))
        cam = {k: float(e[k]) for k in ("exposure", "texture", "px_per_cm") if k in e}
        kw["camera"] = replace(SoilCamera(), target_v=kw["estimator"].target_v, **cam)

        ln = cp["link"]
        kw["adc"] = _typed(AdcModel, ln)
        kw["moisture_map"] = _typed(MoistureMap, ln)

        n = cp["noise"]
        if "image_sigma" in n:
            kw["image_sigma"] = float(n["image_sigma"])
        if "sensor_sigma" in n:
            kw["sensor_sigma"] = float(n["sensor_sigma"])
        if "seed" in n:
            kw["seed"] = int(n["seed"])
    except (ValueError, KeyError) as exc:
        raise ParseError(f"scenario: {exc}") from None
    return Scenario(**kw)


def estimator_config(section) -> EstimatorConfig:
    hsv = _typed(HsvRange, section)
    kw = {}
    if "target_v" in section:
        kw["target_v"] = float(section["target_v"])
    if "min_kept_fraction" in section:
        kw["min_kept_fraction"] = float(section["min_kept_fraction"])
    return EstimatorConfig(hsv, **kw)


def load_scenario(path: str | os.PathLike) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    return parse_scenario(text, os.path.dirname(os.path.abspath(path)))


def parse_config(text: str) -> tuple[MapperConfig, EstimatorConfig]:
    """Pipeline config for ``plan`` / ``estimate``: [mapper] and [estimator] sections."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string(text)
        for name in ("mapper", "estimator"):
            if not cp.has_section(name):
                cp.add_section(name)
        return _typed(MapperConfig, cp["mapper"]), estimator_config(cp["estimator"])
    except (configparser.Error, ValueError) as exc:
        raise ParseError(f"config: {exc}") from None


def load_config(path: str | os.PathLike) -> tuple[MapperConfig, EstimatorConfig]:
    with open(path) as fh:
        return parse_config(fh.read())
