"""Quadrilateral corner selection, canonical ordering, and subpixel refinement."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from pushcorrect.exceptions import NotAQuadrilateral

_MIN_CROSS = 1e-9


def _shoelace(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2.0


def _is_strictly_convex(quad: np.ndarray) -> bool:
    sign = 0.0
    for i in range(4):
        a, b, c = quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cross) < _MIN_CROSS:
            return False
        if sign == 0.0:
            sign = cross
        elif cross * sign < 0.0:
            return False
    return True


def _canonical_order(quad: np.ndarray) -> np.ndarray:
    """Start at the topmost (then leftmost) corner, then proceed
    counter-clockwise as seen on screen (v axis pointing down)."""
    center = quad.mean(axis=0)
    # flipping v makes screen counter-clockwise match increasing atan2
    angles = np.arctan2(-(quad[:, 1] - center[1]), quad[:, 0] - center[0])
    order = np.argsort(angles, kind="stable")
    ring = quad[order]
    start = min(range(4), key=lambda k: (ring[k, 1], ring[k, 0]))
    return np.roll(ring, -start, axis=0)


@dataclass(eq=False)
class CornerSet:
    """Exactly four subpixel image points forming a strictly convex
    quadrilateral, stored in canonical order (deterministic for any input
    permutation of the same corners)."""

    corners: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.corners, dtype=np.float64)
        if pts.shape != (4, 2):
            raise NotAQuadrilateral(f"need exactly 4 points, got {pts.shape}")
        ordered = _canonical_order(pts)
        if not _is_strictly_convex(ordered):
            raise NotAQuadrilateral("points do not form a convex quadrilateral")
        self.corners = ordered


def extract_corners(polygon: np.ndarray) -> CornerSet:
    """Reduce a polygon to its four dominant corners.

    With more than four vertices, the four kept (in polygon order) are those
    maximizing the quadrilateral area. Raises NotAQuadrilateral when fewer
    than four vertices are supplied or no convex quadrilateral exists.
    """
    pts = np.asarray(polygon, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise NotAQuadrilateral("polygon must be an (n, 2) array")
    if len(pts) < 4:
        raise NotAQuadrilateral(f"polygon has {len(pts)} vertices")
    if len(pts) == 4:
        return CornerSet(pts)
    best, best_area = None, -1.0
    for subset in combinations(range(len(pts)), 4):
        quad = pts[list(subset)]
        area = abs(_shoelace(quad))
        if area > best_area:
            best, best_area = quad, area
    return CornerSet(best)


def fit_edge_corners(contour_points: np.ndarray, corners: CornerSet,
                     exclusion: float = 6.0, border_offset: float = 0.5,
                     max_move: float = 8.0) -> CornerSet | None:
    """Refine corners by fitting lines to the border pixels along each edge.

    Border pixel centers sit up to one pixel inside the true region edge, so
    each fitted line is shifted outward by `border_offset`. Contour points
    within `exclusion` pixels of a rough corner are left out of the fits.
    Returns None when any edge has too few points or a refined corner moves
    more than `max_move` pixels (caller falls back to the rough corners).
    """
    pts = np.asarray(contour_points, dtype=np.float64)
    quad = corners.corners
    center = quad.mean(axis=0)

    near_corner = np.zeros(len(pts), dtype=bool)
    for corner in quad:
        near_corner |= np.hypot(pts[:, 0] - corner[0], pts[:, 1] - corner[1]) < exclusion
    usable = pts[~near_corner]
    if len(usable) < 8:
        return None

    # assign usable points to the nearest edge segment
    dists = np.empty((4, len(usable)))
    for i in range(4):
        a, b = quad[i], quad[(i + 1) % 4]
        d = b - a
        length2 = d @ d
        t = np.clip(((usable - a) @ d) / length2, 0.0, 1.0)
        proj = a + t[:, None] * d
        dists[i] = np.hypot(*(usable - proj).T)
    owner = np.argmin(dists, axis=0)

    lines = []
    for i in range(4):
        edge_pts = usable[owner == i]
        if len(edge_pts) < 2:
            return None
        centroid = edge_pts.mean(axis=0)
        centered = edge_pts - centroid
        # dominant direction via the 2x2 scatter eigenvector
        cov = centered.T @ centered
        _, vecs = np.linalg.eigh(cov)
        direction = vecs[:, 1]
        normal = np.array([-direction[1], direction[0]])
        if normal @ (centroid - center) < 0:
            normal = -normal
        point = centroid + border_offset * normal
        lines.append((point, direction))

    refined = np.empty((4, 2))
    for i in range(4):
        # corner i+1 of the rough quad is the junction of edges i and i+1
        p1, d1 = lines[i]
        p2, d2 = lines[(i + 1) % 4]
        denom = d1[0] * d2[1] - d1[1] * d2[0]
        if abs(denom) < 1e-12:
            return None
        t = ((p2[0] - p1[0]) * d2[1] - (p2[1] - p1[1]) * d2[0]) / denom
        refined[(i + 1) % 4] = p1 + t * d1

    if np.hypot(*(refined - quad).T).max() > max_move:
        return None
    try:
        return CornerSet(refined)
    except NotAQuadrilateral:
        return None
