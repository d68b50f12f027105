"""Deterministic planar pick-place-push simulator with a synthetic vision
stack and Monte Carlo error-correction experiments."""

from pushcorrect.geometry import (
    OffsetVec,
    PlanarPose,
    RigidTransform3,
    compose,
    invert,
    planar_offset,
    wrap_angle,
    wrap_quarter,
)

__version__ = "0.1.0"

__all__ = [
    "OffsetVec",
    "PlanarPose",
    "RigidTransform3",
    "compose",
    "invert",
    "planar_offset",
    "wrap_angle",
    "wrap_quarter",
    "__version__",
]
