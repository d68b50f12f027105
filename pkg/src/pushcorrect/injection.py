"""Configurable pre-grasp error injectors.

Errors displace a cube after its pose was last estimated and before the
gripper descends, which is what makes the stale estimate wrong.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from pushcorrect.exceptions import ConfigError
from pushcorrect.geometry import OffsetVec, PlanarPose, wrap_angle
from pushcorrect.world import WorldState

ERROR_KINDS = ("none", "translation", "orientation", "estimator_proxy")


@dataclass(frozen=True)
class ErrorSpec:
    """What to inject: nothing, a shift, a rotation, or both jointly.

    max_shift bounds the uniform per-axis shift; max_rot bounds the uniform
    rotation. estimator_proxy draws shift and rotation jointly, standing in
    for an upstream grasp-pose estimator's failure modes.
    """

    kind: str = "none"
    max_shift: float = 0.025
    max_rot: float = math.radians(40.0)

    def __post_init__(self):
        if self.kind not in ERROR_KINDS:
            raise ConfigError(f"unknown error kind {self.kind!r}")
        if self.max_shift < 0:
            raise ConfigError("max_shift must be >= 0")
        if not 0 <= self.max_rot <= math.pi / 4.0 + 1e-12:
            raise ConfigError("max_rot must lie in [0 deg, 45 deg]")


def inject(world: WorldState, object_id: str, spec: ErrorSpec) -> OffsetVec:
    """Randomly displace a cube per `spec` and return the applied offset.

    Draw order: shift x, shift y, rotation (only the draws the kind uses).
    The displaced footprint must stay on the table and clear of other cubes.
    """
    cube = world._get(object_id)
    if spec.kind == "none":
        return OffsetVec.zero()
    if spec.max_shift > cube.edge / 2.0 + 1e-12:
        raise ConfigError(
            f"max_shift {spec.max_shift} exceeds half the cube edge "
            f"{cube.edge / 2.0}; the grasp could no longer capture the cube")

    dx = dy = dyaw = 0.0
    if spec.kind in ("translation", "estimator_proxy"):
        dx = world.rng.uniform(-spec.max_shift, spec.max_shift)
        dy = world.rng.uniform(-spec.max_shift, spec.max_shift)
    if spec.kind in ("orientation", "estimator_proxy"):
        dyaw = world.rng.uniform(-spec.max_rot, spec.max_rot)

    pose = cube.pose
    moved = PlanarPose(pose.x + dx, pose.y + dy, wrap_angle(pose.yaw + dyaw))
    world._check_pose(cube.id, moved, cube.edge)
    cube.pose = moved
    return OffsetVec(dx, dy, dyaw)
