"""Backend dispatch for the hot pixel kernels.

The numba-compiled kernels are used when available; set RINGTRACK_BACKEND=numpy
to force the pure-numpy fallback (RINGTRACK_BACKEND=numba insists on numba and
raises if it cannot be imported). Both backends implement identical contracts:

    convolve_separable(img, kernel1d) -> filtered image (replicate borders)
    sobel_magnitude(img)              -> gradient magnitude
    label_grid(img)                   -> (int32 label grid, component count)
    render_discs(h, w, cx, cy, r, a)  -> anti-aliased disc raster
"""

import os

import numpy as np

from . import _kernels_numpy

_ENV_VAR = "RINGTRACK_BACKEND"

try:
    from . import _kernels_numba

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
    _kernels_numba = None
    _HAS_NUMBA = False


def _resolve(name: str):
    if name == "auto":
        name = "numba" if _HAS_NUMBA else "numpy"
    if name == "numba":
        if not _HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return "numba", _kernels_numba
    if name == "numpy":
        return "numpy", _kernels_numpy
    raise ValueError(f"unknown backend {name!r}; expected auto, numba or numpy")


_backend_name, _impl = _resolve(os.environ.get(_ENV_VAR, "auto"))


def active_backend() -> str:
    """Name of the backend currently serving kernel calls."""
    return _backend_name


def set_backend(name: str) -> str:
    """Switch backends at runtime ('auto', 'numba' or 'numpy'); returns the choice."""
    global _backend_name, _impl
    _backend_name, _impl = _resolve(name)
    return _backend_name


def convolve_separable(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    return _impl.convolve_separable(
        np.ascontiguousarray(img, dtype=np.float64),
        np.ascontiguousarray(kernel, dtype=np.float64),
    )


def sobel_magnitude(img: np.ndarray) -> np.ndarray:
    return _impl.sobel_magnitude(np.ascontiguousarray(img, dtype=np.float64))


def label_grid(img: np.ndarray) -> tuple[np.ndarray, int]:
    return _impl.label_grid(np.ascontiguousarray(img, dtype=np.float64))


def render_discs(
    height: int,
    width: int,
    cx: np.ndarray,
    cy: np.ndarray,
    radius: np.ndarray,
    intensity: np.ndarray,
) -> np.ndarray:
    return _impl.render_discs(
        int(height),
        int(width),
        np.ascontiguousarray(cx, dtype=np.float64),
        np.ascontiguousarray(cy, dtype=np.float64),
        np.ascontiguousarray(radius, dtype=np.float64),
        np.ascontiguousarray(intensity, dtype=np.float64),
    )
