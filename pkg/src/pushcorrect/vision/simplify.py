"""Farthest-point polyline simplification.

Splits recursively at the point farthest from the current chord until every
remaining point lies within epsilon of its chord. Distances are measured to
the chord segment (not the infinite line), so every input point ends up
within epsilon of the output polyline. Ties on the farthest point resolve
to the lowest index.
"""
from __future__ import annotations

import numpy as np

from pushcorrect.exceptions import DegenerateContour
from pushcorrect.vision.contours import Contour


def _segment_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance of each point to the segment a-b (vectorized)."""
    dx = b[0] - a[0]
    dy = b[1] - a[1]
    length2 = dx * dx + dy * dy
    px = points[:, 0] - a[0]
    py = points[:, 1] - a[1]
    if length2 == 0.0:
        return np.sqrt(px * px + py * py)
    t = (px * dx + py * dy) / length2
    t = np.clip(t, 0.0, 1.0)
    ex = px - t * dx
    ey = py - t * dy
    return np.sqrt(ex * ex + ey * ey)


def _simplify_chain(points: np.ndarray, epsilon: float) -> list[int]:
    """Indices kept for an open chain; endpoints always survive."""
    n = len(points)
    keep = [0, n - 1]
    stack = [(0, n - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        interior = points[lo + 1:hi]
        d = _segment_distances(interior, points[lo], points[hi])
        k = int(np.argmax(d))
        if d[k] > epsilon:
            mid = lo + 1 + k
            keep.append(mid)
            stack.append((lo, mid))
            stack.append((mid, hi))
    return sorted(set(keep))


def simplify(contour: Contour | np.ndarray, epsilon: float,
             closed: bool | None = None) -> np.ndarray:
    """Simplify a contour or raw point array to a reduced polygon.

    Open inputs keep both endpoints. Closed inputs are split at the point
    farthest from the start point and each arc is simplified; the output is
    the vertex cycle without a repeated endpoint.

    Raises DegenerateContour for fewer than 3 points.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if isinstance(contour, Contour):
        points = contour.points.astype(np.float64)
        is_closed = contour.closed if closed is None else closed
    else:
        points = np.asarray(contour, dtype=np.float64)
        is_closed = bool(closed)
    if points.ndim != 2 or points.shape[1] != 2 or len(points) < 3:
        raise DegenerateContour("need at least 3 points to simplify")

    if not is_closed:
        idx = _simplify_chain(points, epsilon)
        return points[idx]

    anchor = points[0]
    d = np.hypot(points[:, 0] - anchor[0], points[:, 1] - anchor[1])
    split = int(np.argmax(d))
    if d[split] == 0.0:
        return points[:1]
    first = points[:split + 1]
    second = np.vstack([points[split:], points[:1]])
    kept_first = [first[i] for i in _simplify_chain(first, epsilon)]
    kept_second = [second[i] for i in _simplify_chain(second, epsilon)]
    # both arcs share their endpoints; drop the duplicates when joining
    return np.asarray(kept_first[:-1] + kept_second[:-1], dtype=np.float64)
