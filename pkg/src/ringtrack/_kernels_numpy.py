"""Pure-numpy implementations of the hot pixel kernels.

Fallback path used when numba is unavailable or disabled via the
RINGTRACK_BACKEND environment variable. Accumulation order matches the
numba kernels tap for tap so both backends agree to float precision.
"""

import numpy as np


def convolve_separable(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Convolve a 2-D image with a symmetric 1-D kernel along both axes.

    Border handling is replicate (edge values extended outward).
    """
    img = np.asarray(img, dtype=np.float64)
    k = np.asarray(kernel, dtype=np.float64)
    radius = k.size // 2

    # rows
    padded = np.pad(img, ((0, 0), (radius, radius)), mode="edge")
    out = np.zeros_like(img)
    for i in range(k.size):
        out += k[i] * padded[:, i : i + img.shape[1]]
    # columns
    padded = np.pad(out, ((radius, radius), (0, 0)), mode="edge")
    out = np.zeros_like(img)
    for i in range(k.size):
        out += k[i] * padded[i : i + img.shape[0], :]
    return out


def sobel_magnitude(img: np.ndarray) -> np.ndarray:
    """Gradient magnitude from the standard 3x3 Sobel pair, replicate borders."""
    img = np.asarray(img, dtype=np.float64)
    p = np.pad(img, 1, mode="edge")
    h, w = img.shape
    tl = p[0:h, 0:w]
    tc = p[0:h, 1 : w + 1]
    tr = p[0:h, 2 : w + 2]
    ml = p[1 : h + 1, 0:w]
    mr = p[1 : h + 1, 2 : w + 2]
    bl = p[2 : h + 2, 0:w]
    bc = p[2 : h + 2, 1 : w + 1]
    br = p[2 : h + 2, 2 : w + 2]
    gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl)
    gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr)
    return np.sqrt(gx * gx + gy * gy)


def label_grid(img: np.ndarray) -> tuple[np.ndarray, int]:
    """4-connected component labels of the nonzero pixels.

    Labels are assigned in row-major scan order of each component's first
    pixel, starting at 1; background stays 0. Implemented as iterated
    min-label propagation (fully vectorized), then relabeled to scan order.
    """
    img = np.asarray(img)
    mask = img != 0
    h, w = img.shape
    labels = np.where(mask, np.arange(1, h * w + 1).reshape(h, w), 0).astype(np.int64)

    while True:
        prev = labels.copy()
        neighbor = np.full((h, w), np.iinfo(np.int64).max, dtype=np.int64)
        up = labels[:-1, :]
        down = labels[1:, :]
        left = labels[:, :-1]
        right = labels[:, 1:]
        neighbor[1:, :] = np.minimum(neighbor[1:, :], np.where(up > 0, up, np.iinfo(np.int64).max))
        neighbor[:-1, :] = np.minimum(neighbor[:-1, :], np.where(down > 0, down, np.iinfo(np.int64).max))
        neighbor[:, 1:] = np.minimum(neighbor[:, 1:], np.where(left > 0, left, np.iinfo(np.int64).max))
        neighbor[:, :-1] = np.minimum(neighbor[:, :-1], np.where(right > 0, right, np.iinfo(np.int64).max))
        labels = np.where(mask, np.minimum(labels, neighbor), 0)
        if np.array_equal(labels, prev):
            break

    # relabel roots to 1..n in scan order of first occurrence
    flat = labels.ravel()
    nonzero = flat[flat > 0]
    if nonzero.size == 0:
        return np.zeros((h, w), dtype=np.int32), 0
    roots, first_idx = np.unique(nonzero, return_index=True)
    order = np.argsort(first_idx)
    remap = np.zeros(int(roots.max()) + 1, dtype=np.int32)
    remap[roots[order]] = np.arange(1, roots.size + 1, dtype=np.int32)
    out = np.zeros(h * w, dtype=np.int32)
    out[flat > 0] = remap[nonzero]
    return out.reshape(h, w), int(roots.size)


def render_discs(
    height: int,
    width: int,
    cx: np.ndarray,
    cy: np.ndarray,
    radius: np.ndarray,
    intensity: np.ndarray,
) -> np.ndarray:
    """Rasterize bright discs with 2x2 supersampled anti-aliasing.

    Overlapping coverage combines via max so values stay within [0, 1]
    (touching discs may share boundary pixels).
    """
    frame = np.zeros((height, width), dtype=np.float64)
    offsets = (-0.25, 0.25)
    for cx_i, cy_i, r_i, a_i in zip(cx, cy, radius, intensity):
        x0 = max(int(np.floor(cx_i - r_i - 1.0)), 0)
        x1 = min(int(np.ceil(cx_i + r_i + 1.0)), width - 1)
        y0 = max(int(np.floor(cy_i - r_i - 1.0)), 0)
        y1 = min(int(np.ceil(cy_i + r_i + 1.0)), height - 1)
        if x1 < x0 or y1 < y0:
            continue
        ys = np.arange(y0, y1 + 1, dtype=np.float64)[:, None]
        xs = np.arange(x0, x1 + 1, dtype=np.float64)[None, :]
        r2 = r_i * r_i
        cover = np.zeros((ys.size, xs.size), dtype=np.float64)
        for oy in offsets:
            for ox in offsets:
                dx = xs + ox - cx_i
                dy = ys + oy - cy_i
                cover += (dx * dx + dy * dy <= r2).astype(np.float64)
        patch = a_i * (cover * 0.25)
        region = frame[y0 : y1 + 1, x0 : x1 + 1]
        np.maximum(region, patch, out=region)
    return frame
