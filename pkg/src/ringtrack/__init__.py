"""Tracking of circular and ring-shaped micro-objects in frame sequences.

Detection runs a band-pass / threshold / connected-component pipeline with
Sobel-based radius estimation and shape filtering; detections are linked
into exclusive minimum-cost forward paths, validated for plausibility, and
fitted for a per-trajectory mobility. A synthetic benchmark generator with
ground-truth scoring is included.
"""

from .detection import DetectedObject, PixelSet, ShapeFilterParams
from .imaging import BandpassParams
from .kernels import active_backend, set_backend
from .linking import DominantAngle, GraphWeights, LinkEdge
from .pipeline import TrackParams, TrackResult, default_params, track_frames
from .synthbench import SynthConfig, config_for_density, evaluate_sequence, generate_sequence
from .trajectory import MobilityEstimate, PlausibilityLimits, Trajectory

__version__ = "0.1.0"

__all__ = [
    "BandpassParams",
    "DetectedObject",
    "DominantAngle",
    "GraphWeights",
    "LinkEdge",
    "MobilityEstimate",
    "PixelSet",
    "PlausibilityLimits",
    "ShapeFilterParams",
    "SynthConfig",
    "TrackParams",
    "TrackResult",
    "Trajectory",
    "active_backend",
    "config_for_density",
    "default_params",
    "evaluate_sequence",
    "generate_sequence",
    "set_backend",
    "track_frames",
    "__version__",
]
