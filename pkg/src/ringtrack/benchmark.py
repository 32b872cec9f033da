"""Timing comparison of the numba and numpy kernel backends.

Run with:  python -m ringtrack.benchmark [--size 400] [--repeats 5]
"""

import argparse
import time

import numpy as np

from . import kernels
from .imaging import boxcar_kernel, gaussian_kernel


def _time(fn, repeats: int) -> float:
    fn()  # warm up (JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run(size: int, repeats: int) -> list[tuple[str, float, float]]:
    rng = np.random.default_rng(0)
    img = rng.random((size, size))
    sparse = (rng.random((size, size)) < 0.05).astype(np.float64)
    gauss = gaussian_kernel(1.0)
    box = boxcar_kernel(5)
    n_discs = 40
    cx = rng.uniform(10, size - 10, n_discs)
    cy = rng.uniform(10, size - 10, n_discs)
    radius = rng.uniform(2, 6, n_discs)
    ones = np.ones(n_discs)

    cases = [
        ("convolve gauss", lambda: kernels.convolve_separable(img, gauss)),
        ("convolve boxcar", lambda: kernels.convolve_separable(img, box)),
        ("sobel magnitude", lambda: kernels.sobel_magnitude(img)),
        ("label components", lambda: kernels.label_grid(sparse)),
        ("render discs", lambda: kernels.render_discs(size, size, cx, cy, radius, ones)),
    ]

    results = []
    for name, fn in cases:
        times = {}
        for backend in ("numpy", "numba"):
            try:
                kernels.set_backend(backend)
            except RuntimeError:
                times[backend] = float("nan")
                continue
            times[backend] = _time(fn, repeats)
        results.append((name, times["numpy"], times["numba"]))
    kernels.set_backend("auto")
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=400, help="frame side in pixels")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    results = run(args.size, args.repeats)
    print(f"{args.size}x{args.size} frames, best of {args.repeats}")
    print(f"{'kernel':<20} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}")
    for name, t_np, t_nb in results:
        speedup = t_np / t_nb if t_nb and not np.isnan(t_nb) else float("nan")
        print(f"{name:<20} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} {speedup:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
