"""Frame loading, normalization and the band-pass / threshold pipeline stage.

Frames are plain 2-D float64 arrays with values in [0, 1]; all operations are
pure and return new arrays.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import kernels
from .errors import IngestionError, InvalidInputError

# ITU-R BT.601 luma weights, applied to RGB inputs (matches PIL's "L" mode).
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

FRAME_EXTENSIONS = (".png", ".tif", ".tiff")


@dataclass(frozen=True)
class BandpassParams:
    """Parameters of the band-pass stage.

    object_size: approximate object width in pixels (boxcar support is
        2 * object_size + 1).
    noise_size: standard deviation of the smoothing Gaussian, in pixels.
    threshold: fraction of the post-filter frame maximum below which pixels
        are zeroed; grayscale above the cutoff is preserved.
    invert: flip the intensity scale before filtering (dark objects on a
        bright background).
    """

    object_size: int = 5
    noise_size: float = 1.0
    threshold: float = 0.25
    invert: bool = False

    def __post_init__(self):
        if self.object_size < 1:
            raise InvalidInputError(f"object_size must be >= 1, got {self.object_size}")
        if self.noise_size <= 0:
            raise InvalidInputError(f"noise_size must be > 0, got {self.noise_size}")
        if not 0.0 <= self.threshold < 1.0:
            raise InvalidInputError(f"threshold must be in [0, 1), got {self.threshold}")


def load_frame(path: str | Path) -> np.ndarray:
    """Load an image file as a grayscale frame scaled to [0, 1].

    RGB(A) inputs are reduced to luminance with the BT.601 weights; 8-bit and
    16-bit integer rasters are scaled by their full representable range.
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            arr = np.asarray(img)
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise IngestionError(f"cannot read image file {path}: {exc}") from exc
    if arr.size == 0 or arr.ndim < 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidInputError(f"image {path} has a zero dimension")

    arr = arr.astype(np.float64)
    if arr.ndim == 3:
        if arr.shape[2] < 3:
            arr = arr[:, :, 0]
        else:
            r, g, b = arr[:, :, 0], arr[:, :, 1], arr[:, :, 2]
            arr = LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b

    if mode in ("I", "I;16", "I;16B", "I;16L", "I;16N"):
        scale = 65535.0
    elif mode == "F":
        scale = 1.0
    else:
        scale = 255.0
    return np.clip(arr / scale, 0.0, 1.0)


def list_frame_files(source: str | Path) -> list[Path]:
    """Resolve a directory or glob pattern to an ordered frame file list.

    Directories yield every PNG/TIFF inside; order is lexicographic by name.
    """
    source = str(source)
    p = Path(source)
    if p.is_file():
        return [p]
    if p.is_dir():
        files = [f for f in p.iterdir() if f.suffix.lower() in FRAME_EXTENSIONS]
    else:
        root = Path(p.anchor) if p.is_absolute() else Path(".")
        pattern = source[len(p.anchor):] if p.is_absolute() else source
        files = [f for f in root.glob(pattern) if f.is_file()]
    return sorted(files, key=lambda f: str(f))


def invert(frame: np.ndarray) -> np.ndarray:
    """Flip the intensity scale: v -> 1 - v. Applying twice restores the input."""
    return 1.0 - np.asarray(frame, dtype=np.float64)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1-D Gaussian of std sigma, truncated at +-ceil(3 sigma) and renormalized."""
    radius = int(np.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def boxcar_kernel(object_size: int) -> np.ndarray:
    """1-D boxcar of width 2 * object_size + 1, normalized to sum 1."""
    width = 2 * object_size + 1
    return np.full(width, 1.0 / width, dtype=np.float64)


def bandpass(frame: np.ndarray, params: BandpassParams) -> np.ndarray:
    """Difference of normalized Gaussian and boxcar smoothing, clamped at 0.

    The Gaussian pass keeps structure above the noise scale, the boxcar pass
    estimates the local background over the object support; subtracting the
    two leaves a nonnegative response peaked on object-sized features.
    Borders replicate so a constant frame maps to an exactly zero frame.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 2:
        raise InvalidInputError(f"expected a 2-D frame, got shape {frame.shape}")
    box = boxcar_kernel(params.object_size)
    gauss = gaussian_kernel(params.noise_size)
    support = max(box.size, gauss.size)
    if support > min(frame.shape):
        raise InvalidInputError(
            f"filter support {support} exceeds frame size {frame.shape}"
        )
    smoothed = kernels.convolve_separable(frame, gauss)
    background = kernels.convolve_separable(frame, box)
    return np.maximum(smoothed - background, 0.0)


def apply_threshold(frame: np.ndarray, threshold: float) -> np.ndarray:
    """Zero every value below threshold * frame maximum; keep the rest as is."""
    if not 0.0 <= threshold < 1.0:
        raise InvalidInputError(f"threshold must be in [0, 1), got {threshold}")
    frame = np.asarray(frame, dtype=np.float64)
    cutoff = threshold * frame.max() if frame.size else 0.0
    return np.where(frame >= cutoff, frame, 0.0)


def preprocess(frame: np.ndarray, params: BandpassParams) -> np.ndarray:
    """Full per-frame pipeline: optional invert, band-pass, threshold."""
    if params.invert:
        frame = invert(frame)
    filtered = bandpass(frame, params)
    return apply_threshold(filtered, params.threshold)
