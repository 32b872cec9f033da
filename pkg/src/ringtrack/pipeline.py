"""End-to-end tracking of a frame sequence: detect, link, validate."""

from dataclasses import dataclass, field

import numpy as np

from .detection import DetectedObject, ShapeFilterParams, detect_objects
from .errors import NoDominantAngleError
from .imaging import BandpassParams
from .linking import (
    DominantAngle,
    GraphWeights,
    LinkEdge,
    apply_costs,
    build_edges,
    dominant_angle,
    link_dijkstra,
)
from .trajectory import PlausibilityLimits, Trajectory, plausibility_split


@dataclass(frozen=True)
class TrackParams:
    """Everything the tracking pipeline needs, bundled."""

    bandpass: BandpassParams = field(default_factory=BandpassParams)
    shape: ShapeFilterParams = field(default_factory=ShapeFilterParams)
    weights: GraphWeights = field(default_factory=GraphWeights)
    limits: PlausibilityLimits = field(default_factory=PlausibilityLimits)
    frame_rate: float = 1.0
    scale: float = 1.0
    c_constant: float = 1.0
    pixel_sigma: float = 1.0


def default_params(object_size: int = 5, shape: str = "circle", **overrides) -> TrackParams:
    """Table-style defaults derived from the approximate object size w.

    max_distance = 10 w, min_diameter = 0.5 w, and the size gate spans
    [0.25 w, 2 w] in radius; remaining values are the documented defaults.
    """
    w = float(object_size)
    params = dict(
        bandpass=BandpassParams(object_size=object_size),
        shape=ShapeFilterParams(shape=shape, min_radius=0.25 * w, max_radius=2.0 * w),
        weights=GraphWeights(max_distance=10.0 * w, min_diameter=0.5 * w),
        limits=PlausibilityLimits(),
    )
    params.update(overrides)
    return TrackParams(**params)


@dataclass
class TrackResult:
    objects_by_frame: list[list[DetectedObject]]
    edges: list[LinkEdge]
    dominant: DominantAngle | None
    raw_paths: list[list[DetectedObject]]
    trajectories: list[Trajectory]

    @property
    def n_objects(self) -> int:
        return sum(len(objs) for objs in self.objects_by_frame)


def track_frames(frames: list[np.ndarray], params: TrackParams) -> TrackResult:
    """Run detection on every frame, link the detections, split by plausibility."""
    objects_by_frame = [
        detect_objects(frame, index, params.bandpass, params.shape)
        for index, frame in enumerate(frames)
    ]
    edges = build_edges(objects_by_frame, params.weights)
    dominant = None
    if params.weights.angle_weight > 0.0 and edges:
        try:
            dominant = dominant_angle(edges)
        except NoDominantAngleError:
            dominant = None
    apply_costs(edges, dominant, params.weights)
    raw_paths = link_dijkstra(objects_by_frame, edges, params.weights)
    trajectories = []
    for path in raw_paths:
        trajectories.extend(
            plausibility_split(path, params.limits, params.weights.min_track_length)
        )
    return TrackResult(
        objects_by_frame=objects_by_frame,
        edges=edges,
        dominant=dominant,
        raw_paths=raw_paths,
        trajectories=trajectories,
    )
