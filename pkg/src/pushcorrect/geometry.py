"""Planar and 3D rigid-body math shared by all modules.

Angles are radians, lengths are meters. Rotations are stored as 3x3
matrices; yaw is extracted only at the planar boundary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi
QUARTER_TURN = math.pi / 2.0

_ORTHO_TOL = 1e-9


def wrap_angle(angle: float) -> float:
    """Wrap an angle to the half-open interval (-pi, pi]."""
    return math.pi - (math.pi - angle) % TWO_PI


def wrap_quarter(angle: float) -> float:
    """Reduce an angle modulo pi/2 to (-pi/4, pi/4].

    Used wherever the four-fold symmetry of a square footprint makes
    yaw meaningful only up to quarter turns.
    """
    quarter = math.pi / 4.0
    return quarter - (quarter - angle) % QUARTER_TURN


@dataclass(frozen=True)
class PlanarPose:
    """Pose of an object on the table plane: position plus heading.

    yaw is normalized to (-pi, pi] at construction.
    """

    x: float
    y: float
    yaw: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.yaw)):
            raise ValueError(f"non-finite pose ({self.x}, {self.y}, {self.yaw})")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    def local_to_world(self, dx: float, dy: float) -> tuple[float, float]:
        """Map a point from this pose's frame to world coordinates."""
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return self.x + c * dx - s * dy, self.y + s * dx + c * dy

    def compose(self, rel: "PlanarPose") -> "PlanarPose":
        """Pose obtained by attaching `rel` (expressed in this frame)."""
        x, y = self.local_to_world(rel.x, rel.y)
        return PlanarPose(x, y, self.yaw + rel.yaw)


@dataclass(frozen=True)
class OffsetVec:
    """Planar displacement between a desired and an actual pose.

    d_xy is the 2D Euclidean norm of (dx, dy), fixed at construction.
    """

    dx: float
    dy: float
    dyaw: float
    d_xy: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "dyaw", wrap_angle(self.dyaw))
        object.__setattr__(self, "d_xy", math.hypot(self.dx, self.dy))

    @classmethod
    def zero(cls) -> "OffsetVec":
        return cls(0.0, 0.0, 0.0)


def planar_offset(desired: PlanarPose, actual: PlanarPose) -> OffsetVec:
    """Signed planar offset of `actual` relative to `desired`.

    dyaw is the wrapped yaw difference; the correction loop gates on
    d_xy only, dyaw is reported for logging.
    """
    return OffsetVec(actual.x - desired.x, actual.y - desired.y,
                     wrap_angle(actual.yaw - desired.yaw))


def _orthonormality_drift(rotation: np.ndarray) -> float:
    return float(np.abs(rotation.T @ rotation - np.eye(3)).max())


def _project_to_rotation(matrix: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(matrix)
    rot = u @ vt
    if np.linalg.det(rot) < 0.0:
        rot = u @ np.diag([1.0, 1.0, -1.0]) @ vt
    return rot


@dataclass(frozen=True, eq=False)
class RigidTransform3:
    """Proper rigid transform in 3D: rotation (3x3 orthonormal) + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.array(self.rotation, dtype=np.float64)
        trans = np.array(self.translation, dtype=np.float64).reshape(3)
        if rot.shape != (3, 3):
            raise ValueError(f"rotation must be 3x3, got {rot.shape}")
        if _orthonormality_drift(rot) > _ORTHO_TOL:
            raise ValueError("rotation is not orthonormal within 1e-9")
        if abs(np.linalg.det(rot) - 1.0) > _ORTHO_TOL:
            raise ValueError("rotation determinant is not +1 within 1e-9")
        rot.setflags(write=False)
        trans.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)

    @classmethod
    def identity(cls) -> "RigidTransform3":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, x: float, y: float, z: float) -> "RigidTransform3":
        return cls(np.eye(3), np.array([x, y, z]))

    @classmethod
    def about_z(cls, yaw: float, translation=(0.0, 0.0, 0.0)) -> "RigidTransform3":
        c, s = math.cos(yaw), math.sin(yaw)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return cls(rot, np.asarray(translation, dtype=np.float64))

    def compose(self, other: "RigidTransform3") -> "RigidTransform3":
        """Return self * other (apply `other` first, then self)."""
        rot = self.rotation @ other.rotation
        if _orthonormality_drift(rot) > _ORTHO_TOL:
            rot = _project_to_rotation(rot)
        trans = self.rotation @ other.translation + self.translation
        return RigidTransform3(rot, trans)

    def invert(self) -> "RigidTransform3":
        rot = self.rotation.T
        return RigidTransform3(rot, -rot @ self.translation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or a stack of points (n, 3)."""
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation

    def yaw(self) -> float:
        """Heading of the rotated x axis projected on the xy plane."""
        return math.atan2(self.rotation[1, 0], self.rotation[0, 0])


def compose(a: RigidTransform3, b: RigidTransform3) -> RigidTransform3:
    return a.compose(b)


def invert(t: RigidTransform3) -> RigidTransform3:
    return t.invert()
