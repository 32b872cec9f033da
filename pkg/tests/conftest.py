"""Shared test fixtures and independent oracle implementations.

The oracles here deliberately avoid the package's computation paths: direct
O(n^2 k^2) convolution instead of separable passes, recursive flood fill
instead of the queue-based labeler, dense supersampling instead of the 2x2
renderer.
"""

import sys

import numpy as np
import pytest


def direct_convolve2d(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Naive full 2-D convolution with replicate (clamped-index) borders."""
    h, w = img.shape
    kh, kw = kernel.shape
    rh, rw = kh // 2, kw // 2
    out = np.zeros_like(img, dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for j in range(kh):
                yy = min(max(y + j - rh, 0), h - 1)
                for i in range(kw):
                    xx = min(max(x + i - rw, 0), w - 1)
                    acc += kernel[j, i] * img[yy, xx]
            out[y, x] = acc
    return out


def direct_sobel(img: np.ndarray) -> np.ndarray:
    gx_k = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
    gy_k = gx_k.T
    h, w = img.shape
    out = np.zeros_like(img, dtype=np.float64)
    for y in range(h):
        for x in range(w):
            gx = 0.0
            gy = 0.0
            for j in range(3):
                yy = min(max(y + j - 1, 0), h - 1)
                for i in range(3):
                    xx = min(max(x + i - 1, 0), w - 1)
                    gx += gx_k[j, i] * img[yy, xx]
                    gy += gy_k[j, i] * img[yy, xx]
            out[y, x] = np.hypot(gx, gy)
    return out


def flood_fill_labels(mask: np.ndarray) -> np.ndarray:
    """Recursive 4-connected flood fill, labels in scan order."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 300000))
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)

    def fill(y: int, x: int, label: int) -> None:
        if y < 0 or y >= h or x < 0 or x >= w:
            return
        if not mask[y, x] or labels[y, x] != 0:
            return
        labels[y, x] = label
        fill(y - 1, x, label)
        fill(y + 1, x, label)
        fill(y, x - 1, label)
        fill(y, x + 1, label)

    next_label = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x] and labels[y, x] == 0:
                next_label += 1
                fill(y, x, next_label)
    return labels


def raster_disc(radius: float, center: tuple[float, float], size: int, subsamples: int = 8) -> np.ndarray:
    """Anti-aliased disc via dense subpixel coverage sampling."""
    cx, cy = center
    img = np.zeros((size, size), dtype=np.float64)
    offsets = (np.arange(subsamples) + 0.5) / subsamples - 0.5
    r2 = radius * radius
    for y in range(size):
        for x in range(size):
            sx = x + offsets[None, :] - cx
            sy = y + offsets[:, None] - cy
            img[y, x] = np.count_nonzero(sx * sx + sy * sy <= r2) / (subsamples * subsamples)
    return img


def raster_ring(outer: float, inner: float, center: tuple[float, float], size: int,
                subsamples: int = 8) -> np.ndarray:
    """Anti-aliased annulus (bright ring, dark center)."""
    return raster_disc(outer, center, size, subsamples) - raster_disc(
        inner, center, size, subsamples
    )


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
