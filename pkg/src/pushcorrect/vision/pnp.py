"""Planar pose estimation from four top-face corners.

The initial estimate comes from a direct linear transformation: the
homography between the model square and the image corners is solved with
Hartley-normalized least squares and decomposed with the intrinsics into a
rotation and translation. The pose is then polished by a damped
Gauss-Newton (Levenberg-Marquardt) minimization of the reprojection error
over a local 6-DoF increment.
"""
from __future__ import annotations

import math

import numpy as np

from pushcorrect.camera import CameraModel
from pushcorrect.exceptions import DivergedOptimization, SingularConfiguration
from pushcorrect.geometry import RigidTransform3
from pushcorrect.vision.corners import CornerSet

_RANK_TOL = 1e-10

LM_INITIAL_DAMPING = 1e-3
LM_STEP_TOL = 1e-10
LM_RELATIVE_COST_TOL = 1e-12
LM_MAX_ITERATIONS = 100
_LM_DAMPING_CEILING = 1e12


def model_corners(edge: float) -> np.ndarray:
    """Top-face corners in the object frame, counter-clockwise, (4, 3).

    The object frame sits at the cube center on the table plane, z up, so
    the top face lies at z = edge.
    """
    h = edge / 2.0
    return np.array([[h, h, edge], [-h, h, edge], [-h, -h, edge], [h, -h, edge]])


def _image_points(corners) -> np.ndarray:
    if isinstance(corners, CornerSet):
        return corners.corners
    pts = np.asarray(corners, dtype=np.float64)
    if pts.shape != (4, 2):
        raise ValueError("corners must be a CornerSet or a (4, 2) array")
    return pts


def _normalization(points: np.ndarray) -> np.ndarray:
    """Similarity moving the centroid to the origin, mean radius sqrt(2)."""
    centroid = points.mean(axis=0)
    spread = np.hypot(*(points - centroid).T).mean()
    if spread < 1e-12:
        raise SingularConfiguration("degenerate point set")
    scale = math.sqrt(2.0) / spread
    return np.array([[scale, 0.0, -scale * centroid[0]],
                     [0.0, scale, -scale * centroid[1]],
                     [0.0, 0.0, 1.0]])


def _homography(model_xy: np.ndarray, image_uv: np.ndarray) -> np.ndarray:
    t_model = _normalization(model_xy)
    t_image = _normalization(image_uv)
    m = (np.column_stack([model_xy, np.ones(4)]) @ t_model.T)
    u = (np.column_stack([image_uv, np.ones(4)]) @ t_image.T)

    rows = []
    for (x, y, _), (px, py, _) in zip(m, u):
        rows.append([-x, -y, -1, 0, 0, 0, px * x, px * y, px])
        rows.append([0, 0, 0, -x, -y, -1, py * x, py * y, py])
    a = np.asarray(rows)
    _, s, vt = np.linalg.svd(a)
    # 8 equations over 9 unknowns: a healthy configuration has rank 8 and a
    # one-dimensional null space; a smaller rank leaves the solution ambiguous
    if s[-1] < _RANK_TOL * s[0]:
        raise SingularConfiguration("corner configuration is rank deficient")
    h_norm = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t_image) @ h_norm @ t_model
    norm = np.linalg.norm(h)
    if norm < 1e-12:
        raise SingularConfiguration("null homography")
    return h / norm


def estimate_pose_dlt(corners, camera: CameraModel, edge: float) -> RigidTransform3:
    """Object pose in the camera frame from the four top-face corners.

    Raises SingularConfiguration for rank-deficient corner layouts.
    """
    image_uv = _image_points(corners)
    model = model_corners(edge)
    h = _homography(model[:, :2], image_uv)

    m = np.linalg.inv(camera.intrinsic_matrix) @ h
    n1 = np.linalg.norm(m[:, 0])
    n2 = np.linalg.norm(m[:, 1])
    if n1 < 1e-12 or n2 < 1e-12:
        raise SingularConfiguration("degenerate homography columns")
    scale = 2.0 / (n1 + n2)
    m = m * scale
    if m[2, 2] < 0.0:  # top-face origin must sit at positive depth
        m = -m
    r1, r2, t_top = m[:, 0], m[:, 1], m[:, 2]
    r3 = np.cross(r1, r2)
    rot_raw = np.column_stack([r1, r2, r3])
    u, _, vt = np.linalg.svd(rot_raw)
    rot = u @ np.diag([1.0, 1.0, np.linalg.det(u @ vt)]) @ vt
    # the homography places the model plane frame at the top-face center;
    # move the origin down to the cube base frame
    translation = t_top - rot @ np.array([0.0, 0.0, edge])
    return RigidTransform3(rot, translation)


def _rodrigues(omega: np.ndarray) -> np.ndarray:
    theta = np.linalg.norm(omega)
    if theta < 1e-12:
        k = np.array([[0.0, -omega[2], omega[1]],
                      [omega[2], 0.0, -omega[0]],
                      [-omega[1], omega[0], 0.0]])
        return np.eye(3) + k  # first order is exact enough below 1e-12
    axis = omega / theta
    k = np.array([[0.0, -axis[2], axis[1]],
                  [axis[2], 0.0, -axis[0]],
                  [-axis[1], axis[0], 0.0]])
    return np.eye(3) + math.sin(theta) * k + (1.0 - math.cos(theta)) * (k @ k)


def reprojection_residuals(rotation: np.ndarray, translation: np.ndarray,
                           model: np.ndarray, image_uv: np.ndarray,
                           camera: CameraModel) -> np.ndarray:
    """Stacked (predicted - observed) pixel residuals, shape (8,)."""
    p = model @ rotation.T + translation
    z = p[:, 2]
    if (z <= 1e-9).any():
        raise DivergedOptimization("model point at non-positive depth")
    u = camera.fx * p[:, 0] / z + camera.cx
    v = camera.fy * p[:, 1] / z + camera.cy
    return np.column_stack([u - image_uv[:, 0], v - image_uv[:, 1]]).ravel()


def reprojection_jacobian(rotation: np.ndarray, translation: np.ndarray,
                          model: np.ndarray, camera: CameraModel) -> np.ndarray:
    """Analytic Jacobian of the residuals w.r.t. a local pose increment.

    Parameters are ordered (rotation increment omega, translation delta);
    the increment acts on the object side: R(omega) = R @ expm([omega]x).
    """
    n = len(model)
    p = model @ rotation.T + translation
    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    duv_dp = np.zeros((n, 2, 3))
    duv_dp[:, 0, 0] = camera.fx / z
    duv_dp[:, 0, 2] = -camera.fx * x / (z * z)
    duv_dp[:, 1, 1] = camera.fy / z
    duv_dp[:, 1, 2] = -camera.fy * y / (z * z)
    skew = np.zeros((n, 3, 3))
    skew[:, 0, 1] = -model[:, 2]
    skew[:, 0, 2] = model[:, 1]
    skew[:, 1, 0] = model[:, 2]
    skew[:, 1, 2] = -model[:, 0]
    skew[:, 2, 0] = -model[:, 1]
    skew[:, 2, 1] = model[:, 0]
    dp_domega = -np.einsum("ab,nbc->nac", rotation, skew)
    jac = np.empty((n, 2, 6))
    jac[:, :, :3] = duv_dp @ dp_domega
    jac[:, :, 3:] = duv_dp
    return jac.reshape(2 * n, 6)


def reprojection_rms(pose: RigidTransform3, corners, camera: CameraModel,
                     edge: float) -> float:
    res = reprojection_residuals(pose.rotation, pose.translation,
                                 model_corners(edge), _image_points(corners), camera)
    return float(np.sqrt(np.mean(res * res)))


def refine_pose_lm(initial: RigidTransform3, corners, camera: CameraModel,
                   edge: float) -> RigidTransform3:
    """Levenberg-Marquardt refinement of the reprojection error.

    Damping starts at 1e-3, divides by 10 on accepted steps and multiplies
    by 10 on rejected ones; convergence on step norm < 1e-10 or relative
    cost decrease < 1e-12, capped at 100 trial steps. The returned pose
    never reprojects worse than the input. Raises DivergedOptimization when
    the cost turns non-finite.
    """
    model = model_corners(edge)
    image_uv = _image_points(corners)
    rot = initial.rotation.copy()
    trans = initial.translation.copy()

    res = reprojection_residuals(rot, trans, model, image_uv, camera)
    cost = float(res @ res)
    if not math.isfinite(cost):
        raise DivergedOptimization("non-finite initial reprojection error")
    if cost < 1e-24:
        return initial

    damping = LM_INITIAL_DAMPING
    for _ in range(LM_MAX_ITERATIONS):
        jac = reprojection_jacobian(rot, trans, model, camera)
        grad = jac.T @ res
        hess = jac.T @ jac
        try:
            step = np.linalg.solve(hess + damping * np.eye(6), -grad)
        except np.linalg.LinAlgError:
            damping *= 10.0
            if damping > _LM_DAMPING_CEILING:
                break
            continue
        step_norm = float(np.linalg.norm(step))
        new_rot = rot @ _rodrigues(step[:3])
        new_trans = trans + step[3:]
        try:
            new_res = reprojection_residuals(new_rot, new_trans, model,
                                             image_uv, camera)
        except DivergedOptimization:
            new_res = None
        new_cost = float(new_res @ new_res) if new_res is not None else math.inf
        if not math.isfinite(new_cost):
            new_cost = math.inf
        if new_cost < cost:
            relative_drop = (cost - new_cost) / cost
            rot, trans, res, cost = new_rot, new_trans, new_res, new_cost
            damping = max(damping / 10.0, 1e-15)
            if step_norm < LM_STEP_TOL or relative_drop < LM_RELATIVE_COST_TOL:
                break
        else:
            damping *= 10.0
            if step_norm < LM_STEP_TOL or damping > _LM_DAMPING_CEILING:
                break

    u, _, vt = np.linalg.svd(rot)
    rot = u @ np.diag([1.0, 1.0, np.linalg.det(u @ vt)]) @ vt
    return RigidTransform3(rot, trans)
