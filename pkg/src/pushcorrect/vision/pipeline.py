"""End-to-end single-object pose estimation from an RGB frame.

threshold -> cleanup -> contours -> simplify -> corners -> DLT -> LM,
then composition with the camera extrinsic into a world-frame planar pose.
"""
from __future__ import annotations

from pathlib import Path

from pushcorrect.camera import CameraModel, RgbImage
from pushcorrect.exceptions import AmbiguousDetection, ObjectNotDetected
from pushcorrect.geometry import PlanarPose, wrap_angle, wrap_quarter
from pushcorrect.vision.color import ColorRange, hsv_threshold, write_pbm
from pushcorrect.vision.contours import trace_contours
from pushcorrect.vision.corners import extract_corners, fit_edge_corners
from pushcorrect.vision.morphology import morph_cleanup
from pushcorrect.vision.pnp import estimate_pose_dlt, refine_pose_lm
from pushcorrect.vision.simplify import simplify

#: Regions below this border-polygon area are treated as noise.
MIN_REGION_AREA_PX = 100.0

#: A second region at least this fraction of the largest makes the
#: detection ambiguous.
AMBIGUITY_RATIO = 0.5

#: Simplification tolerance as a fraction of the contour perimeter.
SIMPLIFY_PERIMETER_FRACTION = 0.02


def estimate_object_world_pose(image: RgbImage, color: ColorRange,
                               camera: CameraModel, edge: float,
                               expected: PlanarPose | None = None,
                               refine_corners: bool = True,
                               debug_dir=None, debug_tag: str = "object",
                               ) -> PlanarPose:
    """Estimate the world-frame planar pose of the one object of `color`.

    A square looks identical under quarter turns, so the estimated yaw is
    the representative closest to `expected` (or to zero when no
    expectation is supplied).

    Raises ObjectNotDetected when no region passes the area floor and
    AmbiguousDetection when several comparable regions do.
    """
    mask = hsv_threshold(image, color)
    cleaned = morph_cleanup(mask)

    if debug_dir is not None:
        debug_dir = Path(debug_dir)
        debug_dir.mkdir(parents=True, exist_ok=True)
        write_pbm(mask, debug_dir / f"{debug_tag}_mask_raw.pbm")
        write_pbm(cleaned, debug_dir / f"{debug_tag}_mask_clean.pbm")

    regions = [(c.area(), c) for c in trace_contours(cleaned)
               if c.closed and c.area() >= MIN_REGION_AREA_PX]
    if not regions:
        raise ObjectNotDetected("no region above the area floor")
    regions.sort(key=lambda item: item[0], reverse=True)
    if len(regions) > 1 and regions[1][0] >= AMBIGUITY_RATIO * regions[0][0]:
        raise AmbiguousDetection(
            f"{len(regions)} comparable regions of the target color")
    contour = regions[0][1]

    epsilon = SIMPLIFY_PERIMETER_FRACTION * contour.perimeter()
    polygon = simplify(contour, epsilon)
    corners = extract_corners(polygon)
    if refine_corners:
        refined = fit_edge_corners(contour.points, corners)
        if refined is not None:
            corners = refined

    if debug_dir is not None:
        lines = [f"{u:.6f} {v:.6f}" for u, v in corners.corners]
        (debug_dir / f"{debug_tag}_corners.txt").write_text("\n".join(lines) + "\n")

    pose_cam = estimate_pose_dlt(corners, camera, edge)
    pose_cam = refine_pose_lm(pose_cam, corners, camera, edge)
    pose_world = camera.extrinsic.compose(pose_cam)

    # The corners constrain the top-face center far better than the base
    # origin: residual tilt noise in the 6-DoF fit would otherwise lever the
    # base origin sideways by edge * tilt. Likewise, quantization noise on
    # the apparent size turns into depth error, which shifts off-center
    # objects laterally; the top-face height is known exactly (cubes stand
    # on the table), so slide the estimate along the viewing ray onto that
    # plane before reading off x and y.
    top_center = pose_world.apply([0.0, 0.0, edge])
    eye = camera.extrinsic.translation
    drop = top_center[2] - eye[2]
    if abs(drop) > 1e-6:
        t_plane = (edge - eye[2]) / drop
        top_center = eye + t_plane * (top_center - eye)
    x, y = float(top_center[0]), float(top_center[1])
    yaw_raw = pose_world.yaw()
    reference = expected.yaw if expected is not None else 0.0
    yaw = wrap_angle(reference + wrap_quarter(yaw_raw - reference))
    return PlanarPose(x, y, yaw)
