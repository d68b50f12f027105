"""Command-line entry point.

Subcommands: run-experiment, run-arrangement, render-debug, validate-config.
Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from pushcorrect.camera import render, write_ppm
from pushcorrect.config import (
    DEFAULT_CONFIG_TEXT,
    build_experiment_config,
    build_scenario,
    load_config,
    parse_config_text,
)
from pushcorrect.controller import run_arrangement
from pushcorrect.exceptions import ConfigError, PushCorrectError
from pushcorrect.experiments import export_boxplot_svg, export_csv, run_experiment
from pushcorrect.vision import COLOR_RANGES, estimate_object_world_pose


def _add_common(parser: argparse.ArgumentParser, config_required: bool = True):
    parser.add_argument("--config", required=config_required,
                        help="YAML configuration file")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY.PATH=VALUE",
                        help="override a config value (repeatable)")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the configured seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pushcorrect",
        description="Planar pick-place simulator with reactive push correction")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run-experiment",
                       help="run a Monte Carlo experiment, write CSV and SVG")
    _add_common(p)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="parallel trial workers (default: available cores)")
    p.add_argument("--output-dir", default=None,
                   help="override experiment.output_dir")

    p = sub.add_parser("run-arrangement",
                       help="run a scenario file through the controller")
    _add_common(p)

    p = sub.add_parser("render-debug",
                       help="dump camera frames and vision intermediates")
    _add_common(p)
    p.add_argument("--debug-dir", default="debug", help="output directory")

    p = sub.add_parser("validate-config", help="schema-check a config file")
    p.add_argument("--config", default=None, help="YAML configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[])
    p.add_argument("--stdin", action="store_true",
                   help="read the config from standard input")
    p.add_argument("--print-default", action="store_true",
                   help="print the fully documented default config and exit")
    return parser


def _cmd_run_experiment(args) -> int:
    data = load_config(Path(args.config), args.overrides)
    cfg = build_experiment_config(data, seed_override=args.seed,
                                  output_override=args.output_dir)
    records, summary = run_experiment(cfg, jobs=max(1, args.jobs))
    out = Path(cfg.output_dir)
    csv_path = export_csv(records, summary, out / f"{cfg.label}.csv")
    svg_path = export_boxplot_svg({cfg.label: summary},
                                  out / f"{cfg.label}_boxplot.svg")

    place, push = summary.after_place, summary.after_push
    print(f"experiment: {cfg.label}  trials: {cfg.resolved_trials}"
          f"  completed: {summary.completed}  failed: {summary.failed}")
    print(f"{'':24s}{'After placing':>18s}{'After pushing':>18s}")
    print(f"{cfg.experiment:24s}"
          f"{place.mean * 1000:9.2f} ± {place.sample_std * 1000:5.2f} mm"
          f"{push.mean * 1000:9.2f} ± {push.sample_std * 1000:5.2f} mm")
    print(f"mean pushes: {summary.mean_push_count:.2f}")
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def _cmd_run_arrangement(args) -> int:
    data = load_config(Path(args.config), args.overrides)
    scenario = build_scenario(data, seed_override=args.seed)
    run_cfg = build_experiment_config(data)
    world = scenario.build_world()
    traces = run_arrangement(scenario.plan, world, run_cfg.camera,
                             run_cfg.resolved_correction,
                             error_spec=scenario.error)
    for t in traces:
        final = t.final_offset
        print(f"{t.object_id}: status={t.terminal_status} pushes={t.push_count}"
              f" injected={t.injected_error.d_xy * 1000:.2f}mm"
              f" after_place={(t.offset_after_place.d_xy * 1000 if t.offset_after_place else float('nan')):.2f}mm"
              f" final={(final.d_xy * 1000 if final else float('nan')):.2f}mm"
              + (f" ({t.failure})" if t.failure else ""))
    return 0 if all(t.terminal_status == "converged" for t in traces) else 2


def _cmd_render_debug(args) -> int:
    data = load_config(Path(args.config), args.overrides)
    scenario = build_scenario(data, seed_override=args.seed)
    camera = build_experiment_config(data).camera
    world = scenario.build_world()
    debug_dir = Path(args.debug_dir)
    debug_dir.mkdir(parents=True, exist_ok=True)
    image = render(world, camera)
    write_ppm(image, debug_dir / "scene.ppm")
    print(f"wrote {debug_dir / 'scene.ppm'}")
    for cube in world.cubes.values():
        try:
            pose = estimate_object_world_pose(
                image, COLOR_RANGES[cube.color], camera, cube.edge,
                expected=cube.pose, debug_dir=debug_dir, debug_tag=cube.id)
            print(f"{cube.id}: estimated ({pose.x * 1000:.2f} mm, "
                  f"{pose.y * 1000:.2f} mm, {math.degrees(pose.yaw):.2f} deg)")
        except PushCorrectError as exc:
            print(f"{cube.id}: {type(exc).__name__}: {exc}")
    return 0


def _cmd_validate_config(args) -> int:
    if args.print_default:
        print(DEFAULT_CONFIG_TEXT, end="")
        return 0
    if args.stdin:
        parse_config_text(sys.stdin.read(), args.overrides)
    elif args.config:
        load_config(Path(args.config), args.overrides)
    else:
        raise ConfigError("provide --config PATH or --stdin")
    print("config ok")
    return 0


_COMMANDS = {
    "run-experiment": _cmd_run_experiment,
    "run-arrangement": _cmd_run_arrangement,
    "render-debug": _cmd_render_debug,
    "validate-config": _cmd_validate_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except PushCorrectError as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
