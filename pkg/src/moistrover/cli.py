"""``moistrover`` command line.

Exit codes: 0 success, 1 domain error, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import replace

from . import calibration as cal
from . import pixmap
from .errors import MoistRoverError, ParseError
from .estimator import EstimatorConfig, estimate_moisture
from .field import render_aerial
from .mapper import GridSpec, MapperConfig, preprocess_field, processed_field
from .nav import Pose, compile_commands, format_commands
from .overlay import render_overlay
from .planner import Cell, GridPath, shortest_path
from .raster import RgbRaster
from .scenario import load_config, load_scenario
from .sim import Simulation


def _cell(text: str) -> Cell:
    try:
        r, c = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected r,c, got {text!r}") from None
    return Cell(r, c)


def _configs(path: str | None) -> tuple[MapperConfig, EstimatorConfig]:
    if path is None:
        return MapperConfig(), EstimatorConfig()
    return load_config(path)


def _model(path: str | None) -> cal.PolynomialModel:
    return cal.PUBLISHED if path is None else cal.load_model(path)


def cmd_fit(args, out) -> int:
    samples = cal.builtin_samples() if args.samples is None else cal.load_samples(args.samples)
    model = cal.fit_polynomial(samples, args.degree)
    out.write(f"degree={model.degree}\n")
    out.write("coeffs=" + ",".join(f"{c:.3f}" for c in model.coeffs) + "\n")
    out.write(f"mse={cal.mse(model, samples):.3f}\n")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(cal.format_model(model))
    return 0


def cmd_predict(args, out) -> int:
    pred = cal.predict_moisture(_model(args.model), args.gray)
    out.write(f"moisture={pred.moisture:.3f}\n")
    if pred.clamped:
        out.write("clamped=true\n")
    return 0


def cmd_plan(args, out) -> int:
    mapper, _ = _configs(args.config)
    img = pixmap.load(args.image)
    grid = preprocess_field(img, mapper)
    path = shortest_path(grid, args.src, args.dst)
    base = processed_field(img, mapper)
    pixmap.save(render_overlay(base, grid.spec, path), args.out)
    out.write(f"{path}\n")
    return 0


def cmd_compile(args, out) -> int:
    text = args.path
    if os.path.isfile(text):
        with open(text) as fh:
            text = fh.read()
    try:
        path = GridPath.parse(text)
    except ValueError:
        raise ParseError(f"bad path {args.path!r}") from None
    spec = GridSpec(
        max(c.row for c in path.cells) + 1, max(c.col for c in path.cells) + 1, args.cell_px, args.cm_per_px
    )
    cmds = compile_commands(path, spec, Pose(path.cells[0], args.heading))
    out.write(format_commands(cmds))
    return 0


def cmd_estimate(args, out) -> int:
    _, est_cfg = _configs(args.config)
    img = pixmap.load(args.image)
    if not isinstance(img, RgbRaster):
        raise ParseError("estimate needs a colour (P6) image")
    out.write(estimate_moisture(img, _model(args.model), est_cfg).format())
    return 0


def cmd_simulate(args, out) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    sim = Simulation(scenario)
    sim.run(args.ticks)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "events.log"), "w") as fh:
        fh.write(sim.log.format())
    base = processed_field(sim.aerial, scenario.mapper)
    for ins in sim.inspections:
        stem = f"t{ins.tick:04d}_s{ins.subfield}"
        pixmap.save(render_overlay(base, sim.grid.spec, ins.path), os.path.join(args.out, f"overlay_{stem}.ppm"))
        pixmap.save(ins.image, os.path.join(args.out, f"soil_{stem}.ppm"))
    out.write(f"events={len(sim.log)} dispatches={len(sim.log.of_kind('DISPATCH'))}\n")
    return 0


def cmd_render(args, out) -> int:
    scenario = load_scenario(args.scenario)
    pixmap.save(render_aerial(scenario.layout(), scenario.aerial_px_per_cm), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moistrover", description="Robotic soil-moisture monitoring simulator")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fit", help="fit a calibration polynomial")
    s.add_argument("--samples", help="gray,moisture file (default: built-in table)")
    s.add_argument("--degree", type=int, choices=(1, 2), required=True)
    s.add_argument("--out", help="write the model file here")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("predict", help="moisture for an average gray value")
    s.add_argument("--gray", type=float, required=True)
    s.add_argument("--model")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("plan", help="shortest path over an aerial image")
    s.add_argument("--image", required=True)
    s.add_argument("--src", type=_cell, required=True)
    s.add_argument("--dst", type=_cell, required=True)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("compile", help="path -> ROTATE/FORWARD commands")
    s.add_argument("--path", required=True, help="'r,c->r,c...' or a file holding one")
    s.add_argument("--cm-per-px", type=float, required=True)
    s.add_argument("--cell-px", type=int, required=True)
    s.add_argument("--heading", type=float, required=True)
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("estimate", help="moisture from a soil image")
    s.add_argument("--image", required=True)
    s.add_argument("--config")
    s.add_argument("--model")
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("simulate", help="run a scenario")
    s.add_argument("--scenario", required=True)
    s.add_argument("--ticks", type=int, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("render", help="render a scenario's aerial image")
    s.add_argument("--scenario", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)
    return p


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return args.func(args, out)
    except ParseError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2
    except MoistRoverError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    except OSError as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
