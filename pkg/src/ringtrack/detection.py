"""Blob extraction and circle/ring shape measurement on filtered frames."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DegenerateObjectError, InvalidInputError, RadiusUndefinedError
from .imaging import BandpassParams, invert, preprocess


@dataclass(frozen=True)
class PixelSet:
    """One 4-connected blob: parallel pixel coordinate/intensity arrays."""

    label: int
    xs: np.ndarray
    ys: np.ndarray
    intensities: np.ndarray

    def __len__(self) -> int:
        return self.xs.size


@dataclass(frozen=True)
class ShapeFilterParams:
    """Acceptance criteria for detected blobs.

    shape: 'circle' (filled disc) or 'ring' (annulus with a dark center).
    circularity_tol: allowed |R^2 pi / pixel_count - 1| for circles.
    center_ratio_max: upper bound on mean/min pixel distance for rings; a
        filled blob drives the ratio up and is rejected.
    match_index_min: lower bound on the interior/exterior contrast index.
    """

    shape: str = "circle"
    min_radius: float = 1.25
    max_radius: float = 10.0
    circularity_tol: float = 0.3
    center_ratio_max: float = 5.0
    match_index_min: float = 0.5

    def __post_init__(self):
        if self.shape not in ("circle", "ring"):
            raise InvalidInputError(f"shape must be 'circle' or 'ring', got {self.shape!r}")
        if not 0 < self.min_radius < self.max_radius:
            raise InvalidInputError(
                f"need 0 < min_radius < max_radius, got {self.min_radius}, {self.max_radius}"
            )
        if self.circularity_tol <= 0 or self.center_ratio_max <= 0:
            raise InvalidInputError("tolerances must be positive")
        if not -1.0 < self.match_index_min < 1.0:
            raise InvalidInputError(
                f"match_index_min must be in (-1, 1), got {self.match_index_min}"
            )


@dataclass
class DetectedObject:
    """A blob that passed the shape filter, with its measured properties."""

    frame: int
    x: float
    y: float
    radius: float
    pixel_count: int
    match_index: float
    pixel_distances: np.ndarray = field(repr=False)


def label_components(frame: np.ndarray) -> list[PixelSet]:
    """Split the nonzero pixels of a frame into 4-connected blobs.

    Blobs are labeled in row-major scan order of their first pixel; pixels
    within a blob are sorted by (y, x).
    """
    frame = np.asarray(frame, dtype=np.float64)
    labels, count = kernels.label_grid(frame)
    if count == 0:
        return []
    ys, xs = np.nonzero(labels)
    blob_ids = labels[ys, xs]
    order = np.argsort(blob_ids, kind="stable")  # row-major within each label
    ys, xs, blob_ids = ys[order], xs[order], blob_ids[order]
    bounds = np.searchsorted(blob_ids, np.arange(1, count + 2))
    sets = []
    for label in range(1, count + 1):
        lo, hi = bounds[label - 1], bounds[label]
        sets.append(
            PixelSet(
                label=label,
                xs=xs[lo:hi].astype(np.int64),
                ys=ys[lo:hi].astype(np.int64),
                intensities=frame[ys[lo:hi], xs[lo:hi]],
            )
        )
    return sets


def compute_centroid(pixels: PixelSet) -> tuple[float, float]:
    """Intensity-weighted mean position of a blob."""
    total = pixels.intensities.sum()
    if total <= 0:
        raise DegenerateObjectError(f"blob {pixels.label} has zero total intensity")
    cx = float((pixels.intensities * pixels.xs).sum() / total)
    cy = float((pixels.intensities * pixels.ys).sum() / total)
    return cx, cy


def centroid_distances(pixels: PixelSet, centroid: tuple[float, float]) -> np.ndarray:
    """Euclidean distance of every blob pixel from the centroid."""
    cx, cy = centroid
    return np.hypot(pixels.xs - cx, pixels.ys - cy)


def sobel(frame: np.ndarray) -> np.ndarray:
    """Gradient magnitude of a frame (3x3 Sobel pair, replicate borders)."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 2 or frame.shape[0] < 3 or frame.shape[1] < 3:
        raise InvalidInputError(f"sobel needs at least a 3x3 frame, got {frame.shape}")
    return kernels.sobel_magnitude(frame)


def compute_radius(
    centroid: tuple[float, float],
    distances: np.ndarray,
    sobel_frame: np.ndarray,
) -> float:
    """Gradient-weighted mean edge distance from the centroid.

    Only gradient pixels strictly between the blob's mean and maximum pixel
    distance contribute: the lower bound discards inner ring edges, the upper
    bound suppresses neighboring objects.
    """
    cx, cy = centroid
    mean_r = float(distances.mean())
    max_r = float(distances.max())
    h, w = sobel_frame.shape
    x0 = max(int(np.floor(cx - max_r)), 0)
    x1 = min(int(np.ceil(cx + max_r)), w - 1)
    y0 = max(int(np.floor(cy - max_r)), 0)
    y1 = min(int(np.ceil(cy + max_r)), h - 1)
    if x1 < x0 or y1 < y0:
        raise RadiusUndefinedError("edge annulus lies outside the frame")
    ys = np.arange(y0, y1 + 1, dtype=np.float64)[:, None]
    xs = np.arange(x0, x1 + 1, dtype=np.float64)[None, :]
    d = np.hypot(xs - cx, ys - cy)
    in_annulus = (d > mean_r) & (d < max_r)
    weights = sobel_frame[y0 : y1 + 1, x0 : x1 + 1][in_annulus]
    total = weights.sum()
    if not in_annulus.any() or total <= 0:
        raise RadiusUndefinedError("no gradient mass between mean and max pixel distance")
    return float((weights * d[in_annulus]).sum() / total)


def match_index(
    pixels: PixelSet,
    centroid: tuple[float, float],
    distances: np.ndarray,
    radius: float,
    frame: np.ndarray,
    shape: str,
) -> float:
    """Contrast statistic comparing interior and exterior of the fitted circle.

    Interior pixels are the blob pixels inside the radius (circles) or inside
    the outer three quarters of the annulus (rings); exterior pixels are all
    grid pixels beyond the radius within the blob's bounding box dilated by
    the radius. Empty grid pixels inside the interior region penalize the
    numerator, so ragged or hollow circles score low. Result is in [-1, 1].
    """
    cx, cy = centroid
    if shape == "circle":
        inner_mask = distances < radius
    else:
        inner_mask = (radius / 4.0 < distances) & (distances < radius)
    if not inner_mask.any():
        return -1.0
    mean_in = float(pixels.intensities[inner_mask].mean())
    mean_all = float(pixels.intensities.mean())

    h, w = frame.shape
    pad = int(np.ceil(radius))
    x0 = max(int(pixels.xs.min()) - pad, 0)
    x1 = min(int(pixels.xs.max()) + pad, w - 1)
    y0 = max(int(pixels.ys.min()) - pad, 0)
    y1 = min(int(pixels.ys.max()) + pad, h - 1)
    ys = np.arange(y0, y1 + 1, dtype=np.float64)[:, None]
    xs = np.arange(x0, x1 + 1, dtype=np.float64)[None, :]
    d = np.hypot(xs - cx, ys - cy)
    window = frame[y0 : y1 + 1, x0 : x1 + 1]

    outside = d > radius
    mean_out = float(window[outside].mean()) if outside.any() else 0.0
    if shape == "circle":
        region = d < radius
    else:
        region = (radius / 4.0 < d) & (d < radius)
    n_empty = int(np.count_nonzero(region & (window == 0.0)))

    penalty = n_empty * mean_all
    denom = mean_in + mean_out + penalty
    if denom <= 0:
        return -1.0
    return float((mean_in - mean_out - penalty) / denom)


def shape_filter(
    radius: float,
    pixel_count: int,
    distances: np.ndarray,
    match_idx: float,
    params: ShapeFilterParams,
) -> tuple[bool, str | None]:
    """Accept or reject a measured blob; rejection names the failed criterion."""
    if not params.min_radius <= radius <= params.max_radius:
        return False, "size"
    if params.shape == "circle":
        if abs(radius * radius * np.pi / pixel_count - 1.0) >= params.circularity_tol:
            return False, "circularity"
    else:
        min_d = float(distances.min())
        if min_d <= 0 or float(distances.mean()) / min_d >= params.center_ratio_max:
            return False, "ring_center"
    if match_idx <= params.match_index_min:
        return False, "match_index"
    return True, None


def touches_border(pixels: PixelSet, shape: tuple[int, int]) -> bool:
    h, w = shape
    return bool(
        (pixels.xs == 0).any()
        or (pixels.ys == 0).any()
        or (pixels.xs == w - 1).any()
        or (pixels.ys == h - 1).any()
    )


def detect_objects(
    frame: np.ndarray,
    frame_index: int,
    bandpass_params: BandpassParams,
    shape_params: ShapeFilterParams,
) -> list[DetectedObject]:
    """Run the full per-frame detection: filter, label, measure, shape-filter.

    Blobs are extracted from the band-passed, thresholded frame; the radius
    is measured on the gradient of the original (inverted-if-requested)
    frame, where object edges are sharpest. Blobs touching the frame border
    are dropped (their centroid and radius are biased); blobs with a
    degenerate edge annulus are dropped as well.
    """
    processed = preprocess(frame, bandpass_params)
    sobel_frame = sobel(invert(frame) if bandpass_params.invert else frame)
    objects = []
    for pixels in label_components(processed):
        if touches_border(pixels, processed.shape):
            continue
        centroid = compute_centroid(pixels)
        distances = centroid_distances(pixels, centroid)
        try:
            radius = compute_radius(centroid, distances, sobel_frame)
        except RadiusUndefinedError:
            continue
        idx = match_index(pixels, centroid, distances, radius, processed, shape_params.shape)
        accepted, _ = shape_filter(radius, len(pixels), distances, idx, shape_params)
        if accepted:
            objects.append(
                DetectedObject(
                    frame=frame_index,
                    x=centroid[0],
                    y=centroid[1],
                    radius=radius,
                    pixel_count=len(pixels),
                    match_index=idx,
                    pixel_distances=distances,
                )
            )
    return objects
