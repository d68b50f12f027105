"""Outer-contour extraction by border following.

The raster is scanned row by row; every border met for the first time is
followed around its full cycle while pixels are relabeled so no border is
traced twice. Hole borders are followed for the bookkeeping but only outer
borders are returned. Foreground components are 8-connected.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pushcorrect.vision.color import BinaryMask

# 8-neighborhood in clockwise order starting East; (di, dj) with i = row.
_CW = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))
_CCW = tuple(reversed(_CW))
_CW_INDEX = {d: k for k, d in enumerate(_CW)}
_CCW_INDEX = {d: k for k, d in enumerate(_CCW)}


@dataclass(eq=False)
class Contour:
    """Ordered border pixels as (u, v) = (column, row) integer coordinates.

    Closed contours have at least 4 points and consecutive points (cyclically)
    are 8-connected. Borders of fewer than 4 pixels are reported open.
    """

    points: np.ndarray
    closed: bool

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise ValueError("points must be a non-empty (n, 2) array")
        if self.closed and len(pts) < 4:
            raise ValueError("closed contours need at least 4 points")
        steps = np.abs(np.diff(pts, axis=0))
        if self.closed:
            steps = np.vstack([steps, np.abs(pts[0] - pts[-1])])
        if len(steps) and (steps.max(axis=1) > 1).any():
            raise ValueError("consecutive points must be 8-connected")
        self.points = pts

    def perimeter(self) -> float:
        pts = self.points.astype(np.float64)
        if len(pts) < 2:
            return 0.0
        loop = np.vstack([pts, pts[:1]]) if self.closed else pts
        return float(np.hypot(*np.diff(loop, axis=0).T).sum())

    def area(self) -> float:
        """Unsigned shoelace area of the border polygon."""
        pts = self.points.astype(np.float64)
        if len(pts) < 3:
            return 0.0
        x, y = pts[:, 0], pts[:, 1]
        return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2.0)


def _follow(field: np.ndarray, i: int, j: int, i2: int, j2: int, label: int):
    """Trace one border starting at (i, j) with (i2, j2) its zero neighbor.

    Marks pixels in `field`: -label where the border touches background on
    the East side, +label otherwise. Returns the border pixel sequence.
    """
    points = [(i, j)]
    # first nonzero neighbor clockwise from (i2, j2)
    start = _CW_INDEX[(i2 - i, j2 - j)]
    first = None
    for k in range(1, 9):
        di, dj = _CW[(start + k) % 8]
        if field[i + di, j + dj] != 0:
            first = (i + di, j + dj)
            break
    if first is None:
        field[i, j] = -label
        return points

    i1, j1 = first
    i2, j2 = i1, j1
    i3, j3 = i, j
    while True:
        # counter-clockwise sweep around (i3, j3) from the next position
        # after (i2, j2); note whether the East neighbor was seen as zero
        start = _CCW_INDEX[(i2 - i3, j2 - j3)]
        east_zero = False
        for k in range(1, 9):
            di, dj = _CCW[(start + k) % 8]
            if field[i3 + di, j3 + dj] != 0:
                i4, j4 = i3 + di, j3 + dj
                break
            if (di, dj) == (0, 1):
                east_zero = True
        if east_zero:
            field[i3, j3] = -label
        elif field[i3, j3] == 1:
            field[i3, j3] = label
        if (i4, j4) == (i, j) and (i3, j3) == (i1, j1):
            break
        i2, j2 = i3, j3
        i3, j3 = i4, j4
        points.append((i3, j3))
    return points


def trace_contours(mask: BinaryMask) -> list[Contour]:
    """Outer borders of all 8-connected foreground components.

    Hole borders are followed and consumed internally but not returned.
    Contours appear in raster-scan discovery order.
    """
    bits = mask.bits
    rows = np.flatnonzero(bits.any(axis=1))
    if len(rows) == 0:
        return []
    cols = np.flatnonzero(bits.any(axis=0))
    r_off, c_off = int(rows[0]), int(cols[0])
    bits = bits[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]

    h, w = bits.shape
    field = np.zeros((h + 2, w + 2), dtype=np.int32)
    field[1:-1, 1:-1] = bits
    label = 1

    fg = field[1:-1, 1:-1] != 0
    outer_cand = fg & (field[1:-1, :-2] == 0)
    hole_cand = fg & (field[1:-1, 2:] == 0)
    candidates = np.argwhere(outer_cand | hole_cand)

    contours = []
    for i0, j0 in candidates:
        i, j = int(i0) + 1, int(j0) + 1
        value = field[i, j]
        if value == 1 and field[i, j - 1] == 0:
            is_outer = True
            i2, j2 = i, j - 1
        elif value >= 1 and field[i, j + 1] == 0:
            is_outer = False
            i2, j2 = i, j + 1
        else:
            continue
        label += 1
        points = _follow(field, i, j, i2, j2, label)
        if is_outer:
            uv = np.array([(p[1] - 1 + c_off, p[0] - 1 + r_off) for p in points],
                          dtype=np.int64)
            contours.append(Contour(uv, closed=len(uv) >= 4))
    return contours
