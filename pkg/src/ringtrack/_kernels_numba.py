"""Numba-compiled implementations of the hot pixel kernels.

Same contracts as _kernels_numpy; loops accumulate in the same tap order so
results agree with the numpy path to float precision.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def convolve_separable(img, kernel):
    h, w = img.shape
    n = kernel.size
    radius = n // 2
    tmp = np.zeros((h, w), dtype=np.float64)
    out = np.zeros((h, w), dtype=np.float64)
    # rows
    for y in range(h):
        for x in range(w):
            s = 0.0
            for i in range(n):
                xi = x + i - radius
                if xi < 0:
                    xi = 0
                elif xi >= w:
                    xi = w - 1
                s += kernel[i] * img[y, xi]
            tmp[y, x] = s
    # columns
    for y in range(h):
        for x in range(w):
            s = 0.0
            for i in range(n):
                yi = y + i - radius
                if yi < 0:
                    yi = 0
                elif yi >= h:
                    yi = h - 1
                s += kernel[i] * tmp[yi, x]
            out[y, x] = s
    return out


@njit(cache=True)
def sobel_magnitude(img):
    h, w = img.shape
    out = np.zeros((h, w), dtype=np.float64)
    for y in range(h):
        ym = y - 1 if y > 0 else 0
        yp = y + 1 if y < h - 1 else h - 1
        for x in range(w):
            xm = x - 1 if x > 0 else 0
            xp = x + 1 if x < w - 1 else w - 1
            tl = img[ym, xm]
            tc = img[ym, x]
            tr = img[ym, xp]
            ml = img[y, xm]
            mr = img[y, xp]
            bl = img[yp, xm]
            bc = img[yp, x]
            br = img[yp, xp]
            gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl)
            gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr)
            out[y, x] = np.sqrt(gx * gx + gy * gy)
    return out


@njit(cache=True)
def label_grid(img):
    h, w = img.shape
    labels = np.zeros((h, w), dtype=np.int32)
    # explicit work queue: recursion is unsafe for large blobs
    queue = np.empty(h * w, dtype=np.int64)
    next_label = 0
    for sy in range(h):
        for sx in range(w):
            if img[sy, sx] == 0.0 or labels[sy, sx] != 0:
                continue
            next_label += 1
            head = 0
            tail = 0
            queue[tail] = sy * w + sx
            tail += 1
            labels[sy, sx] = next_label
            while head < tail:
                idx = queue[head]
                head += 1
                y = idx // w
                x = idx - y * w
                if x > 0 and img[y, x - 1] != 0.0 and labels[y, x - 1] == 0:
                    labels[y, x - 1] = next_label
                    queue[tail] = idx - 1
                    tail += 1
                if x < w - 1 and img[y, x + 1] != 0.0 and labels[y, x + 1] == 0:
                    labels[y, x + 1] = next_label
                    queue[tail] = idx + 1
                    tail += 1
                if y > 0 and img[y - 1, x] != 0.0 and labels[y - 1, x] == 0:
                    labels[y - 1, x] = next_label
                    queue[tail] = idx - w
                    tail += 1
                if y < h - 1 and img[y + 1, x] != 0.0 and labels[y + 1, x] == 0:
                    labels[y + 1, x] = next_label
                    queue[tail] = idx + w
                    tail += 1
    return labels, next_label


@njit(cache=True)
def render_discs(height, width, cx, cy, radius, intensity):
    frame = np.zeros((height, width), dtype=np.float64)
    for k in range(cx.size):
        cx_k = cx[k]
        cy_k = cy[k]
        r_k = radius[k]
        a_k = intensity[k]
        r2 = r_k * r_k
        x0 = int(np.floor(cx_k - r_k - 1.0))
        x1 = int(np.ceil(cx_k + r_k + 1.0))
        y0 = int(np.floor(cy_k - r_k - 1.0))
        y1 = int(np.ceil(cy_k + r_k + 1.0))
        if x0 < 0:
            x0 = 0
        if y0 < 0:
            y0 = 0
        if x1 > width - 1:
            x1 = width - 1
        if y1 > height - 1:
            y1 = height - 1
        for y in range(y0, y1 + 1):
            for x in range(x0, x1 + 1):
                cover = 0.0
                for oy in (-0.25, 0.25):
                    for ox in (-0.25, 0.25):
                        dx = x + ox - cx_k
                        dy = y + oy - cy_k
                        if dx * dx + dy * dy <= r2:
                            cover += 1.0
                value = a_k * (cover * 0.25)
                if value > frame[y, x]:
                    frame[y, x] = value
    return frame
