"""Perception chain: color segmentation, cleanup, contour tracing, polygon
simplification, corner extraction, planar pose estimation."""

from pushcorrect.vision.color import (
    COLOR_RANGES,
    BinaryMask,
    ColorRange,
    hsv_threshold,
    rgb_to_hsv,
)
from pushcorrect.vision.contours import Contour, trace_contours
from pushcorrect.vision.corners import CornerSet, extract_corners, fit_edge_corners
from pushcorrect.vision.morphology import morph_cleanup
from pushcorrect.vision.pipeline import estimate_object_world_pose
from pushcorrect.vision.pnp import estimate_pose_dlt, refine_pose_lm
from pushcorrect.vision.simplify import simplify

__all__ = [
    "COLOR_RANGES",
    "BinaryMask",
    "ColorRange",
    "Contour",
    "CornerSet",
    "estimate_object_world_pose",
    "estimate_pose_dlt",
    "extract_corners",
    "fit_edge_corners",
    "hsv_threshold",
    "morph_cleanup",
    "refine_pose_lm",
    "rgb_to_hsv",
    "simplify",
    "trace_contours",
]
