"""HSV conversion and color-interval segmentation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pushcorrect import _kernels
from pushcorrect.camera import RgbImage


def rgb_to_hsv(pixel) -> tuple[float, float, float]:
    """Hexcone conversion of one 8-bit RGB triple.

    Returns hue in degrees [0, 360), saturation and value as fractions.
    Gray pixels (zero spread) report hue 0; black reports s = 0.
    """
    r, g, b = (int(c) for c in pixel)
    mx = max(r, g, b)
    mn = min(r, g, b)
    v = mx / 255.0
    if mx == 0:
        return 0.0, 0.0, 0.0
    spread = float(mx) - float(mn)
    s = spread / float(mx)
    if spread == 0.0:
        h = 0.0
    elif mx == r:
        h = (60.0 * (float(g) - float(b)) / spread) % 360.0
    elif mx == g:
        h = 60.0 * (float(b) - float(r)) / spread + 120.0
    else:
        h = 60.0 * (float(r) - float(g)) / spread + 240.0
    return h, s, v


@dataclass(frozen=True)
class ColorRange:
    """Hue interval (degrees, wraparound when hue_min > hue_max) plus
    saturation and value floors."""

    hue_min: float
    hue_max: float
    sat_min: float
    val_min: float

    def __post_init__(self):
        if not (0 <= self.sat_min <= 1 and 0 <= self.val_min <= 1):
            raise ValueError("sat_min and val_min must lie in [0, 1]")
        if not (0 <= self.hue_min < 360 and 0 <= self.hue_max < 360):
            raise ValueError("hue bounds must lie in [0, 360)")

    def contains(self, h: float, s: float, v: float) -> bool:
        if s < self.sat_min or v < self.val_min:
            return False
        if self.hue_min > self.hue_max:  # wrapped interval
            return h >= self.hue_min or h <= self.hue_max
        return self.hue_min <= h <= self.hue_max


#: Segmentation ranges for the four cube colors.
COLOR_RANGES = {
    "red": ColorRange(335.0, 25.0, 0.40, 0.30),
    "yellow": ColorRange(35.0, 85.0, 0.40, 0.30),
    "green": ColorRange(95.0, 145.0, 0.40, 0.30),
    "blue": ColorRange(215.0, 265.0, 0.40, 0.30),
}


@dataclass(eq=False)
class BinaryMask:
    """Boolean raster with the same dimensions as its source image."""

    bits: np.ndarray

    def __post_init__(self):
        if self.bits.ndim != 2 or self.bits.dtype != np.bool_:
            raise ValueError("bits must be a 2D boolean array")

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


def hsv_threshold(image: RgbImage, color_range: ColorRange) -> BinaryMask:
    """Mask of pixels whose HSV lies inside `color_range`."""
    bits = _kernels.hsv_in_range_mask(
        image.pixels,
        float(color_range.hue_min), float(color_range.hue_max),
        float(color_range.sat_min), float(color_range.val_min))
    return BinaryMask(bits)


def write_pbm(mask: BinaryMask, path) -> None:
    """Binary PBM (P4) dump, rows padded to whole bytes."""
    from pathlib import Path

    header = f"P4\n{mask.width} {mask.height}\n".encode("ascii")
    packed = np.packbits(mask.bits, axis=1)
    Path(path).write_bytes(header + packed.tobytes())
