"""Quasi-static table scene: cubes, parallel-jaw gripper, pick/place/push.

Contact is modeled with explicit alignment rules instead of a dynamics
engine. Failed actions raise and leave the scene untouched, although the
noise draws they consumed stay consumed (the random stream only moves
forward).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from pushcorrect.exceptions import (
    DistanceCapExceeded,
    GraspInfeasible,
    NothingHeld,
    ObjectNotFound,
    OutOfBounds,
    PlacementCollision,
    PushBlocked,
)
from pushcorrect.geometry import PlanarPose, wrap_angle, wrap_quarter

CUBE_COLORS = ("red", "green", "blue", "yellow")

#: Fraction of the half-edge by which the cube center slides along the
#: finger-plate direction while the closing jaws rotate it into alignment.
#: Scales with sin(misalignment); zero for an already aligned cube.
GRASP_ALIGN_SLIP = 0.25

#: Single-push travel cap in meters.
PUSH_DISTANCE_CAP = 0.05

#: Per-push yaw pull toward the nearest face-aligned heading, and the cap
#: on how much yaw one push can correct.
PUSH_YAW_PULL = 0.8
PUSH_YAW_CORRECTION_CAP = math.radians(10.0)

_EPS = 1e-12


@dataclass(frozen=True)
class TableBounds:
    """Axis-aligned workspace rectangle on the table plane."""

    x_min: float = -0.42
    y_min: float = -0.22
    x_max: float = 0.42
    y_max: float = 0.22

    def __post_init__(self):
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ValueError("degenerate table bounds")

    def contains_points(self, points: np.ndarray) -> bool:
        return bool(
            (points[:, 0] >= self.x_min).all()
            and (points[:, 0] <= self.x_max).all()
            and (points[:, 1] >= self.y_min).all()
            and (points[:, 1] <= self.y_max).all()
        )


@dataclass(frozen=True)
class GripperModel:
    """Two-finger parallel gripper, dimensions in meters."""

    max_opening: float = 0.085
    finger_thickness: float = 0.01
    fingertip_width: float = 0.02

    def __post_init__(self):
        if min(self.max_opening, self.finger_thickness, self.fingertip_width) <= 0:
            raise ValueError("gripper dimensions must be positive")


@dataclass(frozen=True)
class NoiseProfile:
    """Unmodeled-error magnitudes for one fidelity mode.

    pixel_noise_sigma is dimensionless; the renderer maps one unit of it
    to 25.5 intensity counts (10% of the 8-bit channel range).
    """

    mode: str
    grasp_lateral_sigma: float
    release_sigma: float
    release_yaw_sigma: float
    push_distance_rel_sigma: float
    push_lateral_sigma: float
    pixel_noise_sigma: float

    def __post_init__(self):
        if self.mode not in ("sim", "real"):
            raise ValueError(f"unknown noise mode {self.mode!r}")
        for name in ("grasp_lateral_sigma", "release_sigma", "release_yaw_sigma",
                     "push_distance_rel_sigma", "push_lateral_sigma",
                     "pixel_noise_sigma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def sim(cls) -> "NoiseProfile":
        return cls("sim", 0.0003, 0.0003, math.radians(0.3), 0.02, 0.0002, 0.2)

    @classmethod
    def real(cls) -> "NoiseProfile":
        return cls("real", 0.0015, 0.0020, math.radians(1.0), 0.06, 0.0005, 0.5)

    @classmethod
    def quiet(cls) -> "NoiseProfile":
        """All sigmas zero; handy for deterministic tests."""
        return cls("sim", 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def check_profile_pair(sim: NoiseProfile, real: NoiseProfile) -> None:
    """Every sim-mode sigma must be <= its real-mode counterpart."""
    for name in ("grasp_lateral_sigma", "release_sigma", "release_yaw_sigma",
                 "push_distance_rel_sigma", "push_lateral_sigma",
                 "pixel_noise_sigma"):
        if getattr(sim, name) > getattr(real, name):
            raise ValueError(f"sim {name} exceeds real {name}")


@dataclass
class CubeObject:
    """Uniformly colored cube resting on the table plane."""

    id: str
    color: str
    pose: PlanarPose
    edge: float = 0.05

    def __post_init__(self):
        if self.color not in CUBE_COLORS:
            raise ValueError(f"unknown cube color {self.color!r}")
        if self.edge <= 0:
            raise ValueError("edge must be positive")

    @property
    def height(self) -> float:
        return self.edge

    def footprint(self) -> np.ndarray:
        return footprint_corners(self.pose, self.edge)


@dataclass
class HeldObject:
    """Cube held in the gripper plus its pose relative to the gripper frame."""

    cube: CubeObject
    rel_pose: PlanarPose


def footprint_corners(pose: PlanarPose, edge: float) -> np.ndarray:
    """World-frame corners (4, 2) of a square footprint, counter-clockwise."""
    h = edge / 2.0
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    local = np.array([[h, h], [-h, h], [-h, -h], [h, -h]])
    rot = np.array([[c, -s], [s, c]])
    return local @ rot.T + np.array([pose.x, pose.y])


def _projected_gap(poly_a: np.ndarray, poly_b: np.ndarray) -> bool:
    """True if some edge normal of poly_a separates the two convex polygons."""
    n = len(poly_a)
    for i in range(n):
        edge = poly_a[(i + 1) % n] - poly_a[i]
        axis = np.array([-edge[1], edge[0]])
        pa = poly_a @ axis
        pb = poly_b @ axis
        if pa.max() <= pb.min() + _EPS or pb.max() <= pa.min() + _EPS:
            return True
    return False


def convex_overlap(poly_a: np.ndarray, poly_b: np.ndarray) -> bool:
    """Separating-axis overlap test for two convex polygons (touching is ok)."""
    return not (_projected_gap(poly_a, poly_b) or _projected_gap(poly_b, poly_a))


def _convex_hull(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, counter-clockwise, no repeated endpoint."""
    pts = sorted(map(tuple, points))
    if len(pts) <= 2:
        return np.asarray(pts, dtype=np.float64)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2:
                ox, oy = out[-2]
                ax, ay = out[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return np.asarray(lower[:-1] + upper[:-1], dtype=np.float64)


class WorldState:
    """Single-owner mutable table scene with a seeded random stream.

    One trial owns one world; identical seed plus identical action sequence
    reproduces the trajectory bit for bit.
    """

    def __init__(self, cubes, noise: NoiseProfile, seed: int,
                 table: TableBounds | None = None,
                 gripper: GripperModel | None = None):
        self.table = table or TableBounds()
        self.noise = noise
        self.gripper = gripper or GripperModel()
        self.rng = np.random.default_rng(seed)
        self.seed = int(seed)
        self.held: HeldObject | None = None
        self.cubes: dict[str, CubeObject] = {}
        for cube in cubes:
            if cube.id in self.cubes:
                raise ValueError(f"duplicate cube id {cube.id!r}")
            if self.gripper.max_opening <= cube.edge:
                raise ValueError("gripper cannot open wider than the cube edge")
            self._check_pose(cube.id, cube.pose, cube.edge)
            self.cubes[cube.id] = cube

    # -- invariant helpers ---------------------------------------------------

    def _check_pose(self, cube_id: str, pose: PlanarPose, edge: float) -> None:
        corners = footprint_corners(pose, edge)
        if not self.table.contains_points(corners):
            raise OutOfBounds(f"{cube_id}: footprint leaves the table")
        for other in self.cubes.values():
            if other.id == cube_id:
                continue
            if convex_overlap(corners, other.footprint()):
                raise PlacementCollision(f"{cube_id} overlaps {other.id}")

    def _get(self, object_id: str) -> CubeObject:
        try:
            return self.cubes[object_id]
        except KeyError:
            raise ObjectNotFound(object_id) from None

    # -- actions ---------------------------------------------------------------

    def pick(self, object_id: str, grasp_pose: PlanarPose) -> PlanarPose:
        """Grasp a cube at `grasp_pose` and lift it off the table.

        The jaws close along the gripper's local y axis. The closing-axis
        offset is eliminated (parallel jaws center the cube) up to Gaussian
        lateral noise; the perpendicular offset persists as drag error. A
        misaligned cube snaps its faces to the fingertips, sliding the
        center by GRASP_ALIGN_SLIP * (edge/2) * sin(misalignment) along the
        finger-plate direction.

        Returns the held pose relative to the gripper frame.
        """
        if self.held is not None:
            raise GraspInfeasible("gripper already holds an object")
        cube = self._get(object_id)
        half = cube.edge / 2.0

        c, s = math.cos(grasp_pose.yaw), math.sin(grasp_pose.yaw)
        dx = cube.pose.x - grasp_pose.x
        dy = cube.pose.y - grasp_pose.y
        rel_x = c * dx + s * dy          # perpendicular (drag) axis
        rel_y = -s * dx + c * dy         # closing axis
        misalign = wrap_quarter(cube.pose.yaw - grasp_pose.yaw)

        lateral = self.rng.normal() * self.noise.grasp_lateral_sigma

        if math.pi / 4.0 - abs(misalign) < 1e-9:
            raise GraspInfeasible("fingers meet the cube corner-on")
        fits_between_jaws = abs(rel_y) + half < self.gripper.max_opening / 2.0
        center_over_cube = abs(rel_y) <= half + _EPS
        if not (fits_between_jaws or center_over_cube):
            raise GraspInfeasible("cube outside the closing-axis capture range")
        if abs(rel_x) > half + _EPS:
            raise GraspInfeasible("fingertips miss the cube sideways")

        slip = GRASP_ALIGN_SLIP * half * math.sin(misalign)
        rel = PlanarPose(rel_x + slip, lateral, 0.0)
        del self.cubes[object_id]
        self.held = HeldObject(cube, rel)
        return rel

    def place(self, desired_pose: PlanarPose) -> PlanarPose:
        """Release the held cube at `desired_pose` plus held offset and noise.

        Draw order: release x, release y, release yaw.
        """
        if self.held is None:
            raise NothingHeld("no object in the gripper")
        nx = self.rng.normal() * self.noise.release_sigma
        ny = self.rng.normal() * self.noise.release_sigma
        nyaw = self.rng.normal() * self.noise.release_yaw_sigma

        base = desired_pose.compose(self.held.rel_pose)
        actual = PlanarPose(base.x + nx, base.y + ny, base.yaw + nyaw)

        cube = self.held.cube
        self._check_pose(cube.id, actual, cube.edge)
        cube.pose = actual
        self.cubes[cube.id] = cube
        self.held = None
        return actual

    def push(self, object_id: str, axis: str, signed_distance: float) -> PlanarPose:
        """Push a cube along a world axis with the jaws nearly closed.

        Travel picks up relative distance noise, the orthogonal axis picks
        up lateral noise, and the caged cube's yaw is pulled toward the
        nearest quarter-turn heading. Draw order: relative, lateral.
        """
        cube = self._get(object_id)
        if axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
        if abs(signed_distance) > PUSH_DISTANCE_CAP + _EPS:
            raise DistanceCapExceeded(f"|{signed_distance}| > {PUSH_DISTANCE_CAP}")

        rel = self.rng.normal() * self.noise.push_distance_rel_sigma
        lat = self.rng.normal() * self.noise.push_lateral_sigma
        travel = signed_distance * (1.0 + rel)
        if axis == "x":
            new_x, new_y = cube.pose.x + travel, cube.pose.y + lat
        else:
            new_x, new_y = cube.pose.x + lat, cube.pose.y + travel

        deviation = wrap_quarter(cube.pose.yaw)
        correction = math.copysign(
            min(PUSH_YAW_PULL * abs(deviation), PUSH_YAW_CORRECTION_CAP), deviation)
        new_pose = PlanarPose(new_x, new_y, wrap_angle(cube.pose.yaw - correction))

        end = footprint_corners(new_pose, cube.edge)
        if not self.table.contains_points(end):
            raise OutOfBounds(f"{object_id}: push leaves the table")
        corridor = _convex_hull(np.vstack([cube.footprint(), end]))
        for other in self.cubes.values():
            if other.id == object_id:
                continue
            if convex_overlap(corridor, other.footprint()):
                raise PushBlocked(f"corridor of {object_id} hits {other.id}")

        cube.pose = new_pose
        return new_pose
