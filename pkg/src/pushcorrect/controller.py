"""Reactive placement correction: pick, place, inspect, push until aligned.

The loop is closed through perception: every gate decision uses the
vision-estimated offset. Ground-truth offsets from the simulator state are
recorded in the traces for analysis only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from pushcorrect.camera import CameraModel, render
from pushcorrect.exceptions import (
    ConfigError,
    CorrectionStalled,
    SimulationError,
    VisionError,
)
from pushcorrect.geometry import OffsetVec, PlanarPose, planar_offset
from pushcorrect.injection import ErrorSpec, inject
from pushcorrect.vision import COLOR_RANGES, estimate_object_world_pose
from pushcorrect.world import PUSH_DISTANCE_CAP, WorldState, convex_overlap, footprint_corners

#: Doing no better than the previous measurement this many pushes in a row
#: aborts the loop.
STALL_LIMIT = 3

#: Correction thresholds below half a millimeter chase system noise and make
#: placements worse; they are rejected outright.
THRESHOLD_FLOOR = 0.0005


@dataclass(frozen=True)
class CorrectionConfig:
    """Correction-loop gate and budget."""

    threshold: float = 0.001
    max_pushes: int = 20
    defer_correction: bool = False

    def __post_init__(self):
        if self.threshold < THRESHOLD_FLOOR:
            raise ConfigError(
                f"threshold {self.threshold} m is below the {THRESHOLD_FLOOR} m floor")
        if self.max_pushes < 1:
            raise ConfigError("max_pushes must be >= 1")


@dataclass(frozen=True)
class ArrangementPlan:
    """Ordered (object id, desired pose) assignments."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((str(oid), pose) for oid, pose in self.entries)
        ids = [oid for oid, _ in entries]
        if len(set(ids)) != len(ids):
            raise ConfigError("duplicate object ids in the plan")
        if not entries:
            raise ConfigError("empty arrangement plan")
        object.__setattr__(self, "entries", entries)

    def validate_against(self, world: WorldState) -> None:
        for oid, _ in self.entries:
            if oid not in world.cubes:
                raise ConfigError(f"plan references unknown object {oid!r}")
        footprints = []
        for oid, pose in self.entries:
            edge = world.cubes[oid].edge
            corners = footprint_corners(pose, edge)
            if not world.table.contains_points(corners):
                raise ConfigError(f"desired pose of {oid!r} leaves the table")
            for other_id, other in footprints:
                if convex_overlap(corners, other):
                    raise ConfigError(
                        f"desired footprints of {oid!r} and {other_id!r} overlap")
            footprints.append((oid, corners))


@dataclass
class ObjectTrace:
    """Per-object record of one arrangement run.

    Offsets are ground truth from the simulator state; the vision-side
    estimates that actually gated the loop are logged alongside.
    """

    object_id: str
    injected_error: OffsetVec = field(default_factory=OffsetVec.zero)
    offset_after_place: OffsetVec | None = None
    offsets_after_each_push: list = field(default_factory=list)
    terminal_status: str = "failed"
    vision_offset_after_place: OffsetVec | None = None
    vision_offset_final: OffsetVec | None = None
    failure: str | None = None

    @property
    def push_count(self) -> int:
        return len(self.offsets_after_each_push)

    @property
    def final_offset(self) -> OffsetVec | None:
        if self.offsets_after_each_push:
            return self.offsets_after_each_push[-1]
        return self.offset_after_place


def choose_push(offset: OffsetVec, last_axis: str | None = None,
                threshold: float = 0.001) -> tuple[str, float]:
    """Pick the next push axis and signed travel distance.

    The first push attacks the axis with the larger offset component;
    subsequent pushes alternate between x and y, except that an alternate
    component below threshold/2 is skipped in favor of the dominant axis.
    Travel is the negated offset component, capped at the single-push limit.
    """
    if offset.d_xy <= 0.0:
        raise ValueError("choose_push requires a non-zero offset")
    dominant = "x" if abs(offset.dx) >= abs(offset.dy) else "y"
    if last_axis is None:
        axis = dominant
    else:
        axis = "y" if last_axis == "x" else "x"
        component = offset.dx if axis == "x" else offset.dy
        if abs(component) < threshold / 2.0:
            axis = dominant
    component = offset.dx if axis == "x" else offset.dy
    distance = -component
    distance = max(-PUSH_DISTANCE_CAP, min(PUSH_DISTANCE_CAP, distance))
    return axis, distance


def _estimate(world: WorldState, camera: CameraModel, cube,
              expected: PlanarPose | None) -> PlanarPose:
    image = render(world, camera)
    return estimate_object_world_pose(image, COLOR_RANGES[cube.color], camera,
                                      cube.edge, expected=expected)


def correction_loop(object_id: str, desired_pose: PlanarPose,
                    world: WorldState, camera: CameraModel,
                    config: CorrectionConfig,
                    initial_offset: OffsetVec | None = None,
                    ground_truth_log: list | None = None,
                    ) -> tuple[OffsetVec, int]:
    """Push the placed object until the estimated offset beats the threshold.

    Returns the final vision-estimated offset and the number of pushes.
    Raises CorrectionStalled after STALL_LIMIT consecutive non-improving
    pushes; simulator errors (blocked corridor, bounds) propagate.
    """
    cube = world._get(object_id)
    if initial_offset is None:
        estimate = _estimate(world, camera, cube, desired_pose)
        offset = planar_offset(desired_pose, estimate)
    else:
        offset = initial_offset

    pushes = 0
    last_axis: str | None = None
    stall = 0
    while offset.d_xy >= config.threshold and pushes < config.max_pushes:
        axis, distance = choose_push(offset, last_axis, config.threshold)
        world.push(object_id, axis, distance)
        pushes += 1
        last_axis = axis
        if ground_truth_log is not None:
            ground_truth_log.append(
                planar_offset(desired_pose, world.cubes[object_id].pose))
        estimate = _estimate(world, camera, cube, desired_pose)
        new_offset = planar_offset(desired_pose, estimate)
        if new_offset.d_xy >= offset.d_xy:
            stall += 1
            if stall >= STALL_LIMIT:
                raise CorrectionStalled(
                    f"{object_id}: no improvement over {STALL_LIMIT} pushes")
        else:
            stall = 0
        offset = new_offset
    return offset, pushes


def run_arrangement(plan: ArrangementPlan, world: WorldState,
                    camera: CameraModel, config: CorrectionConfig,
                    error_spec: ErrorSpec | None = None) -> list[ObjectTrace]:
    """Execute the full pipeline for every plan entry.

    Per object: estimate pose, optionally inject a pre-grasp error (the
    estimate goes stale), pick at the stale estimate, place at the desired
    pose, re-estimate, then correct. With defer_correction all objects are
    placed before any correction starts. Failures are recorded per object
    without aborting the rest.
    """
    plan.validate_against(world)
    traces = {oid: ObjectTrace(oid) for oid, _ in plan.entries}
    placed: list[tuple[str, PlanarPose]] = []

    for oid, desired in plan.entries:
        trace = traces[oid]
        estimate = None
        try:
            cube = world.cubes[oid]
            estimate = _estimate(world, camera, cube, expected=None)
            if error_spec is not None:
                trace.injected_error = inject(world, oid, error_spec)
            world.pick(oid, estimate)
            world.place(desired)
            trace.offset_after_place = planar_offset(desired, world.cubes[oid].pose)
            after_place = _estimate(world, camera, cube, expected=desired)
            trace.vision_offset_after_place = planar_offset(desired, after_place)
        except (SimulationError, VisionError) as exc:
            trace.failure = f"{type(exc).__name__}: {exc}"
            if world.held is not None and estimate is not None:
                try:  # return the cube to its free pickup spot
                    world.place(estimate)
                except SimulationError:
                    world.held = None  # drop it from the scene as a last resort
                    trace.failure += "; object lost during recovery"
            continue
        if config.defer_correction:
            placed.append((oid, desired))
        else:
            _correct_one(trace, oid, desired, world, camera, config)

    for oid, desired in placed:
        _correct_one(traces[oid], oid, desired, world, camera, config)

    return [traces[oid] for oid, _ in plan.entries]


def _correct_one(trace: ObjectTrace, oid: str, desired: PlanarPose,
                 world: WorldState, camera: CameraModel,
                 config: CorrectionConfig) -> None:
    try:
        final, _ = correction_loop(
            oid, desired, world, camera, config,
            initial_offset=trace.vision_offset_after_place,
            ground_truth_log=trace.offsets_after_each_push)
        trace.vision_offset_final = final
        if final.d_xy < config.threshold:
            trace.terminal_status = "converged"
        else:
            trace.terminal_status = "push_budget_exhausted"
    except (SimulationError, VisionError, CorrectionStalled) as exc:
        trace.failure = f"{type(exc).__name__}: {exc}"
        trace.terminal_status = "failed"
