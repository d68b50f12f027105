"""Binary mask cleanup with a 7x7 all-ones structuring element.

The cleanup applies erosion -> dilation first and dilation -> erosion
second. Pixels outside the raster read as background for both operations.
"""
from __future__ import annotations

import numpy as np

from pushcorrect import _kernels
from pushcorrect.vision.color import BinaryMask

KERNEL_SIZE = 7


def erode(bits: np.ndarray, k: int = KERNEL_SIZE) -> np.ndarray:
    return _kernels.box_erode(bits, k)


def dilate(bits: np.ndarray, k: int = KERNEL_SIZE) -> np.ndarray:
    return _kernels.box_dilate(bits, k)


def morph_cleanup(mask: BinaryMask) -> BinaryMask:
    """Erosion, dilation, dilation, erosion with the 7x7 element.

    The first erosion kills speckles anywhere in the frame; the remaining
    passes only ever touch pixels within KERNEL_SIZE of what survived, so
    they run on a cropped window. The result is identical to full-frame
    application.
    """
    eroded = erode(mask.bits)
    rows = np.flatnonzero(eroded.any(axis=1))
    if len(rows) == 0:
        return BinaryMask(eroded)
    cols = np.flatnonzero(eroded.any(axis=0))
    h, w = eroded.shape
    pad = KERNEL_SIZE
    r0, r1 = max(rows[0] - pad, 0), min(rows[-1] + pad + 1, h)
    c0, c1 = max(cols[0] - pad, 0), min(cols[-1] + pad + 1, w)
    window = np.ascontiguousarray(eroded[r0:r1, c0:c1])
    window = erode(dilate(dilate(window)))
    out = np.zeros_like(eroded)
    out[r0:r1, c0:c1] = window
    return BinaryMask(out)
