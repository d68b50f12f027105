"""Synthetic top-down pinhole camera: projection, rasterization, PPM dump.

The camera renders each cube's top face as a filled flat-color quad over a
neutral gray table. No lens distortion, no lighting, no side faces: at a
top-down view with centimeter-scale lateral offsets the side faces stay
negligible, and the perception chain only consumes the top-face quad.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from statistics import NormalDist

import numpy as np

from pushcorrect import _kernels
from pushcorrect.exceptions import BehindCamera
from pushcorrect.geometry import RigidTransform3
from pushcorrect.world import WorldState, footprint_corners

#: Flat colors for rendering; table is low-saturation gray.
CUBE_RGB = {
    "red": (200, 35, 35),
    "green": (35, 200, 35),
    "blue": (35, 35, 200),
    "yellow": (200, 200, 35),
}
TABLE_RGB = (110, 110, 110)

#: Intensity counts per unit of NoiseProfile.pixel_noise_sigma (10% of range).
NOISE_COUNTS_PER_UNIT = 25.5

_MIN_DEPTH = 1e-9


def top_down_extrinsic(height: float = 0.70, at=(0.0, 0.0)) -> RigidTransform3:
    """Camera pose in the world frame: optical axis straight down.

    Camera x aligns with world x; camera y and z are flipped so that +z
    (the viewing direction) points at the table.
    """
    rot = np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    return RigidTransform3(rot, np.array([at[0], at[1], height]))


@dataclass(frozen=True, eq=False)
class CameraModel:
    """Pinhole intrinsics plus a camera-in-world extrinsic."""

    fx: float = 900.0
    fy: float = 900.0
    cx: float = 640.0
    cy: float = 360.0
    width: int = 1280
    height: int = 720
    extrinsic: RigidTransform3 = field(default_factory=top_down_extrinsic)

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point outside the image")
        object.__setattr__(self, "_world_to_cam", self.extrinsic.invert())

    @property
    def intrinsic_matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx],
                         [0.0, self.fy, self.cy],
                         [0.0, 0.0, 1.0]])

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        return self._world_to_cam.apply(points)


def project(camera: CameraModel, point_world) -> tuple[float, float]:
    """Project one world point to pixel coordinates.

    Raises BehindCamera for non-positive depth.
    """
    p = camera.world_to_camera(np.asarray(point_world, dtype=np.float64))
    if p[2] <= _MIN_DEPTH:
        raise BehindCamera(f"depth {p[2]:.3g} m")
    u = camera.fx * p[0] / p[2] + camera.cx
    v = camera.fy * p[1] / p[2] + camera.cy
    return float(u), float(v)


def project_points(camera: CameraModel, points: np.ndarray) -> np.ndarray:
    """Vectorized projection of (n, 3) world points to (n, 2) pixels."""
    pts = camera.world_to_camera(np.asarray(points, dtype=np.float64))
    if (pts[:, 2] <= _MIN_DEPTH).any():
        raise BehindCamera("point at non-positive depth")
    uv = np.empty((len(pts), 2))
    uv[:, 0] = camera.fx * pts[:, 0] / pts[:, 2] + camera.cx
    uv[:, 1] = camera.fy * pts[:, 1] / pts[:, 2] + camera.cy
    return uv


@dataclass(eq=False)
class RgbImage:
    """Row-major 8-bit RGB raster."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3 or self.pixels.dtype != np.uint8:
            raise ValueError("pixels must be a uint8 array of shape (h, w, 3)")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@lru_cache(maxsize=8)
def _noise_lut(sigma_counts: float) -> np.ndarray:
    """Signed channel increments indexed by a 16-bit uniform draw.

    Inverse normal CDF sampled at 65536 quantiles, scaled and rounded to
    integer counts: a quantized Gaussian finer than the 8-bit channel step.
    """
    inv_cdf = NormalDist().inv_cdf
    q = (np.arange(65536) + 0.5) / 65536.0
    table = np.array([inv_cdf(p) for p in q])
    return np.rint(table * sigma_counts).astype(np.int16)


def _fill_quad(pixels: np.ndarray, quad: np.ndarray, color) -> None:
    """Fill a convex quad given in pixel coordinates; boundary inclusive."""
    h, w, _ = pixels.shape
    area2 = 0.0
    for i in range(4):
        x1, y1 = quad[i]
        x2, y2 = quad[(i + 1) % 4]
        area2 += x1 * y2 - x2 * y1
    if area2 < 0.0:
        quad = quad[::-1]
    c0 = max(int(math.ceil(quad[:, 0].min())), 0)
    c1 = min(int(math.floor(quad[:, 0].max())), w - 1)
    r0 = max(int(math.ceil(quad[:, 1].min())), 0)
    r1 = min(int(math.floor(quad[:, 1].max())), h - 1)
    if c0 > c1 or r0 > r1:
        return
    uu = np.arange(c0, c1 + 1, dtype=np.float64)[None, :]
    vv = np.arange(r0, r1 + 1, dtype=np.float64)[:, None]
    inside = np.ones((r1 - r0 + 1, c1 - c0 + 1), dtype=bool)
    for i in range(4):
        x1, y1 = quad[i]
        x2, y2 = quad[(i + 1) % 4]
        inside &= (x2 - x1) * (vv - y1) - (y2 - y1) * (uu - x1) >= 0.0
    region = pixels[r0:r1 + 1, c0:c1 + 1]
    region[inside] = color


def render(world: WorldState, camera: CameraModel) -> RgbImage:
    """Rasterize the scene top faces and add per-pixel sensor noise.

    Zero-noise renders are pure functions of (world, camera); with noise
    enabled the draw comes from the world's random stream, so a fixed seed
    gives a bit-identical raster.
    """
    pixels = np.empty((camera.height, camera.width, 3), dtype=np.uint8)
    if TABLE_RGB[0] == TABLE_RGB[1] == TABLE_RGB[2]:
        pixels.fill(TABLE_RGB[0])
    else:
        pixels[:] = TABLE_RGB
    for cube in world.cubes.values():
        corners = footprint_corners(cube.pose, cube.edge)
        top = np.column_stack([corners, np.full(4, cube.height)])
        quad = project_points(camera, top)
        _fill_quad(pixels, quad, CUBE_RGB[cube.color])
    sigma = world.noise.pixel_noise_sigma
    if sigma > 0.0:
        draws = world.rng.integers(0, 65536, size=pixels.shape, dtype=np.uint16)
        _kernels.add_channel_noise(pixels, _noise_lut(sigma * NOISE_COUNTS_PER_UNIT), draws)
    return RgbImage(pixels)


def write_ppm(image: RgbImage, path) -> None:
    """Binary PPM (P6) dump, bit-exact header and payload."""
    path = Path(path)
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    path.write_bytes(header + image.pixels.tobytes())
