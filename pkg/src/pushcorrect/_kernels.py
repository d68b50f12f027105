"""Compiled per-pixel kernels for the render and segmentation hot path.

Everything here is an implementation detail; the public contracts live in
camera.py and vision/. Kernels are written against zero-padded boundary
semantics: pixels outside the raster read as background/false.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def add_channel_noise(pixels, lut, draws):
    """Add table-driven noise to an RGB raster in place, clamping to [0, 255].

    lut maps a 16-bit uniform draw to a signed channel increment; the table
    is built from the inverse normal CDF so increments are Gaussian.
    """
    h, w, _ = pixels.shape
    for i in range(h):
        for j in range(w):
            for c in range(3):
                v = np.int32(pixels[i, j, c]) + np.int32(lut[draws[i, j, c]])
                if v < 0:
                    v = 0
                elif v > 255:
                    v = 255
                pixels[i, j, c] = np.uint8(v)


@njit(cache=True)
def hsv_in_range_mask(pixels, hue_lo, hue_hi, sat_min, val_min):
    """Classify pixels by hue/saturation/value interval, hue wrap allowed.

    Mirrors the scalar hexcone conversion in vision.color exactly (float64,
    same branch order) so the mask equals per-pixel rgb_to_hsv + compare.
    """
    h, w, _ = pixels.shape
    out = np.zeros((h, w), np.bool_)
    wrap = hue_lo > hue_hi
    for i in range(h):
        for j in range(w):
            r = pixels[i, j, 0]
            g = pixels[i, j, 1]
            b = pixels[i, j, 2]
            mx = r
            if g > mx:
                mx = g
            if b > mx:
                mx = b
            if mx == 0:
                continue  # black: v = 0, s undefined -> reject
            mn = r
            if g < mn:
                mn = g
            if b < mn:
                mn = b
            val = np.float64(mx) / 255.0
            if val < val_min:
                continue
            spread = np.float64(mx) - np.float64(mn)
            sat = spread / np.float64(mx)
            if sat < sat_min:
                continue
            if spread == 0.0:
                hue = 0.0
            elif mx == r:
                hue = (60.0 * (np.float64(g) - np.float64(b)) / spread) % 360.0
            elif mx == g:
                hue = 60.0 * (np.float64(b) - np.float64(r)) / spread + 120.0
            else:
                hue = 60.0 * (np.float64(r) - np.float64(g)) / spread + 240.0
            if wrap:
                ok = hue >= hue_lo or hue <= hue_hi
            else:
                ok = hue_lo <= hue <= hue_hi
            out[i, j] = ok
    return out


@njit(cache=True)
def box_erode(mask, k):
    """Binary erosion with a k x k all-ones element, zero padding outside."""
    h, w = mask.shape
    r = k // 2
    tmp = np.zeros((h, w), np.bool_)
    for i in range(h):
        run = 0
        for j in range(w):
            run = run + 1 if mask[i, j] else 0
            if run >= k:
                tmp[i, j - r] = True
    out = np.zeros((h, w), np.bool_)
    for j in range(w):
        run = 0
        for i in range(h):
            run = run + 1 if tmp[i, j] else 0
            if run >= k:
                out[i - r, j] = True
    return out


@njit(cache=True)
def box_dilate(mask, k):
    """Binary dilation with a k x k all-ones element."""
    h, w = mask.shape
    r = k // 2
    tmp = np.zeros((h, w), np.bool_)
    for i in range(h):
        last = -(k + 1)
        for j in range(w):
            if mask[i, j]:
                last = j
            if j - last <= r:
                tmp[i, j] = True
        last = w + k + 1
        for j in range(w - 1, -1, -1):
            if mask[i, j]:
                last = j
            if last - j <= r:
                tmp[i, j] = True
    out = np.zeros((h, w), np.bool_)
    for j in range(w):
        last = -(k + 1)
        for i in range(h):
            if tmp[i, j]:
                last = i
            if i - last <= r:
                out[i, j] = True
        last = h + k + 1
        for i in range(h - 1, -1, -1):
            if tmp[i, j]:
                last = i
            if last - i <= r:
                out[i, j] = True
    return out
