"""YAML configuration: schema validation, defaults, dotted overrides.

A config file may contain an `experiment` section (for run-experiment), a
`scenario` section (for run-arrangement and render-debug), and optional
`noise`, `error`, `correction`, `camera`, and `table` sections shared by
both. Every field has a default; unknown keys are rejected with their path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import yaml

from pushcorrect.camera import CameraModel, top_down_extrinsic
from pushcorrect.controller import ArrangementPlan, CorrectionConfig
from pushcorrect.exceptions import ConfigError
from pushcorrect.experiments import EXPERIMENTS, ExperimentConfig
from pushcorrect.geometry import PlanarPose
from pushcorrect.injection import ERROR_KINDS, ErrorSpec
from pushcorrect.world import (
    CUBE_COLORS,
    CubeObject,
    NoiseProfile,
    TableBounds,
    WorldState,
)

_TOP_LEVEL = ("experiment", "scenario", "noise", "error", "correction",
              "camera", "table")

_NOISE_KEYS = ("grasp_lateral_sigma", "release_sigma", "release_yaw_sigma_deg",
               "push_distance_rel_sigma", "push_lateral_sigma",
               "pixel_noise_sigma")

DEFAULT_CONFIG_TEXT = """\
# Default configuration; every key shown here carries its default value.
experiment:
  kind: nominal          # nominal|translation|orientation|estimator_proxy|arrangement_demo
  mode: sim              # sim|real
  trials: null           # null -> 100 for sim, 10 for real
  base_seed: 20260809
  output_dir: results

# scenario:              # used by run-arrangement / render-debug
#   seed: 7
#   cubes:
#     - {id: red-cube, color: red, start: [0.0, 0.0, 0.0], desired: [0.12, 0.08, 0.0]}

# noise:                 # override the per-mode defaults (meters / degrees)
#   grasp_lateral_sigma: 0.0003
#   release_sigma: 0.0003
#   release_yaw_sigma_deg: 0.3
#   push_distance_rel_sigma: 0.02
#   push_lateral_sigma: 0.0002
#   pixel_noise_sigma: 0.2

# error:
#   kind: none           # none|translation|orientation|estimator_proxy
#   max_shift: 0.025     # meters
#   max_rot_deg: 40.0

correction:
  threshold: 0.001       # meters
  max_pushes: 20
  defer_correction: false

camera:
  fx: 900.0
  fy: 900.0
  cx: 640.0
  cy: 360.0
  width: 1280
  height: 720
  height_above_table: 0.70

table:
  bounds: [-0.42, -0.22, 0.42, 0.22]   # x_min, y_min, x_max, y_max (meters)
"""


@dataclass
class Scenario:
    """Materialized run-arrangement inputs."""

    seed: int
    cubes: list
    plan: ArrangementPlan
    noise: NoiseProfile
    table: TableBounds
    error: ErrorSpec | None

    def build_world(self, seed: int | None = None) -> WorldState:
        cubes = [CubeObject(c.id, c.color, c.pose, c.edge) for c in self.cubes]
        return WorldState(cubes, self.noise, self.seed if seed is None else seed,
                          table=self.table)


def load_config(source: str | Path, overrides: list[str] | None = None) -> dict:
    """Parse YAML from a path (or literal text) and apply overrides."""
    if isinstance(source, Path) or "\n" not in str(source):
        text = Path(source).read_text()
    else:
        text = str(source)
    return parse_config_text(text, overrides)


def parse_config_text(text: str, overrides: list[str] | None = None) -> dict:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    for override in overrides or []:
        data = _apply_override(data, override)
    _validate(data)
    return data


def _apply_override(data: dict, override: str) -> dict:
    if "=" not in override:
        raise ConfigError(f"override {override!r} must look like key.path=value")
    dotted, raw = override.split("=", 1)
    try:
        value = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigError(f"override value {raw!r}: {exc}") from exc
    node = data
    parts = dotted.strip().split(".")
    for part in parts[:-1]:
        nxt = node.setdefault(part, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"override path {dotted!r} crosses non-mapping {part!r}")
        node = nxt
    node[parts[-1]] = value
    return data


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _expect_mapping(node, path: str, allowed: tuple) -> dict:
    if not isinstance(node, dict):
        _fail(path, "must be a mapping")
    for key in node:
        if key not in allowed:
            _fail(f"{path}.{key}", f"unknown key (allowed: {', '.join(allowed)})")
    return node


def _expect_number(node, path: str, lo=None, hi=None) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        _fail(path, f"must be a number, got {node!r}")
    if lo is not None and node < lo:
        _fail(path, f"must be >= {lo}")
    if hi is not None and node > hi:
        _fail(path, f"must be <= {hi}")
    return float(node)


def _expect_pose(node, path: str) -> PlanarPose:
    if not isinstance(node, (list, tuple)) or len(node) != 3:
        _fail(path, "must be [x_m, y_m, yaw_deg]")
    x = _expect_number(node[0], f"{path}[0]")
    y = _expect_number(node[1], f"{path}[1]")
    yaw = _expect_number(node[2], f"{path}[2]")
    return PlanarPose(x, y, math.radians(yaw))


def _validate(data: dict) -> None:
    _expect_mapping(data, "config", _TOP_LEVEL)
    if "experiment" in data:
        exp = _expect_mapping(data["experiment"], "experiment",
                              ("kind", "mode", "trials", "base_seed", "output_dir"))
        if "kind" in exp and exp["kind"] not in EXPERIMENTS:
            _fail("experiment.kind", f"must be one of {EXPERIMENTS}")
        if "mode" in exp and exp["mode"] not in ("sim", "real"):
            _fail("experiment.mode", "must be sim or real")
        if exp.get("trials") is not None:
            _expect_number(exp["trials"], "experiment.trials", lo=1)
        if "base_seed" in exp:
            _expect_number(exp["base_seed"], "experiment.base_seed")
        if "output_dir" in exp and not isinstance(exp["output_dir"], str):
            _fail("experiment.output_dir", "must be a string path")
    if "noise" in data:
        noise = _expect_mapping(data["noise"], "noise", _NOISE_KEYS + ("mode",))
        for key in _NOISE_KEYS:
            if key in noise:
                _expect_number(noise[key], f"noise.{key}", lo=0.0)
    if "error" in data:
        err = _expect_mapping(data["error"], "error",
                              ("kind", "max_shift", "max_rot_deg"))
        if "kind" in err and err["kind"] not in ERROR_KINDS:
            _fail("error.kind", f"must be one of {ERROR_KINDS}")
        if "max_shift" in err:
            _expect_number(err["max_shift"], "error.max_shift", lo=0.0)
        if "max_rot_deg" in err:
            _expect_number(err["max_rot_deg"], "error.max_rot_deg", lo=0.0, hi=45.0)
    if "correction" in data:
        corr = _expect_mapping(data["correction"], "correction",
                               ("threshold", "max_pushes", "defer_correction"))
        if "threshold" in corr:
            _expect_number(corr["threshold"], "correction.threshold", lo=0.0)
        if "max_pushes" in corr:
            _expect_number(corr["max_pushes"], "correction.max_pushes", lo=1)
        if "defer_correction" in corr and not isinstance(corr["defer_correction"], bool):
            _fail("correction.defer_correction", "must be true or false")
    if "camera" in data:
        cam = _expect_mapping(data["camera"], "camera",
                              ("fx", "fy", "cx", "cy", "width", "height",
                               "height_above_table"))
        for key in cam:
            _expect_number(cam[key], f"camera.{key}", lo=0.0)
    if "table" in data:
        table = _expect_mapping(data["table"], "table", ("bounds",))
        if "bounds" in table:
            bounds = table["bounds"]
            if not isinstance(bounds, (list, tuple)) or len(bounds) != 4:
                _fail("table.bounds", "must be [x_min, y_min, x_max, y_max]")
            for i, v in enumerate(bounds):
                _expect_number(v, f"table.bounds[{i}]")
    if "scenario" in data:
        scn = _expect_mapping(data["scenario"], "scenario", ("seed", "cubes"))
        if "seed" in scn:
            _expect_number(scn["seed"], "scenario.seed")
        cubes = scn.get("cubes")
        if cubes is not None:
            if not isinstance(cubes, list) or not cubes:
                _fail("scenario.cubes", "must be a non-empty list")
            for i, cube in enumerate(cubes):
                c = _expect_mapping(cube, f"scenario.cubes[{i}]",
                                    ("id", "color", "start", "desired", "edge"))
                for req in ("id", "color", "start", "desired"):
                    if req not in c:
                        _fail(f"scenario.cubes[{i}]", f"missing key {req!r}")
                if c["color"] not in CUBE_COLORS:
                    _fail(f"scenario.cubes[{i}].color",
                          f"must be one of {CUBE_COLORS}")
                _expect_pose(c["start"], f"scenario.cubes[{i}].start")
                _expect_pose(c["desired"], f"scenario.cubes[{i}].desired")
                if "edge" in c:
                    _expect_number(c["edge"], f"scenario.cubes[{i}].edge", lo=0.001)


def build_table(data: dict) -> TableBounds:
    bounds = data.get("table", {}).get("bounds")
    if bounds is None:
        return TableBounds()
    return TableBounds(*(float(b) for b in bounds))


def build_camera(data: dict) -> CameraModel:
    cam = data.get("camera", {})
    height = float(cam.get("height_above_table", 0.70))
    return CameraModel(
        fx=float(cam.get("fx", 900.0)), fy=float(cam.get("fy", 900.0)),
        cx=float(cam.get("cx", 640.0)), cy=float(cam.get("cy", 360.0)),
        width=int(cam.get("width", 1280)), height=int(cam.get("height", 720)),
        extrinsic=top_down_extrinsic(height))


def build_noise(data: dict, mode: str) -> NoiseProfile | None:
    noise = data.get("noise")
    if noise is None:
        return None
    base = NoiseProfile.sim() if mode == "sim" else NoiseProfile.real()
    return NoiseProfile(
        mode=mode,
        grasp_lateral_sigma=float(noise.get("grasp_lateral_sigma",
                                            base.grasp_lateral_sigma)),
        release_sigma=float(noise.get("release_sigma", base.release_sigma)),
        release_yaw_sigma=math.radians(float(noise.get(
            "release_yaw_sigma_deg", math.degrees(base.release_yaw_sigma)))),
        push_distance_rel_sigma=float(noise.get("push_distance_rel_sigma",
                                                base.push_distance_rel_sigma)),
        push_lateral_sigma=float(noise.get("push_lateral_sigma",
                                           base.push_lateral_sigma)),
        pixel_noise_sigma=float(noise.get("pixel_noise_sigma",
                                          base.pixel_noise_sigma)))


def build_error(data: dict) -> ErrorSpec | None:
    err = data.get("error")
    if err is None:
        return None
    return ErrorSpec(kind=err.get("kind", "none"),
                     max_shift=float(err.get("max_shift", 0.025)),
                     max_rot=math.radians(float(err.get("max_rot_deg", 40.0))))


def build_correction(data: dict) -> CorrectionConfig | None:
    corr = data.get("correction")
    if corr is None:
        return None
    return CorrectionConfig(
        threshold=float(corr.get("threshold", 0.001)),
        max_pushes=int(corr.get("max_pushes", 20)),
        defer_correction=bool(corr.get("defer_correction", False)))


def build_experiment_config(data: dict, seed_override: int | None = None,
                            output_override: str | None = None,
                            ) -> ExperimentConfig:
    exp = data.get("experiment", {})
    mode = exp.get("mode", "sim")
    trials = exp.get("trials")
    return ExperimentConfig(
        experiment=exp.get("kind", "nominal"),
        mode=mode,
        trials=None if trials is None else int(trials),
        base_seed=int(seed_override if seed_override is not None
                      else exp.get("base_seed", 20260809)),
        output_dir=str(output_override if output_override is not None
                       else exp.get("output_dir", "results")),
        noise=build_noise(data, mode),
        error=build_error(data),
        correction=build_correction(data),
        camera=build_camera(data),
        table=build_table(data))


def build_scenario(data: dict, seed_override: int | None = None) -> Scenario:
    scn = data.get("scenario")
    if scn is None or "cubes" not in scn:
        raise ConfigError("scenario.cubes: required for this command")
    cubes = []
    entries = []
    for c in scn["cubes"]:
        pose = _expect_pose(c["start"], "scenario.start")
        desired = _expect_pose(c["desired"], "scenario.desired")
        cubes.append(CubeObject(str(c["id"]), c["color"], pose,
                                float(c.get("edge", 0.05))))
        entries.append((str(c["id"]), desired))
    noise = build_noise(data, data.get("experiment", {}).get("mode", "sim"))
    if noise is None:
        noise = NoiseProfile.sim()
    seed = int(seed_override if seed_override is not None else scn.get("seed", 0))
    return Scenario(seed=seed, cubes=cubes,
                    plan=ArrangementPlan(tuple(entries)), noise=noise,
                    table=build_table(data), error=build_error(data))
