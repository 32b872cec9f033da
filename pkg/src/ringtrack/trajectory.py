"""Plausibility validation of raw paths and per-trajectory property fitting."""

import math
from dataclasses import dataclass, field

import numpy as np

from .detection import DetectedObject
from .errors import DegenerateErrorModelError, InvalidInputError


@dataclass(frozen=True)
class PlausibilityLimits:
    """Limits against which a path's internal consistency is checked.

    max_angle_dev_deg: largest allowed deviation of a segment direction from
        the fragment's mean direction.
    max_angle_std_deg: cap on the spread of segment directions.
    max_radius_rel_std / max_distance_rel_std: caps on std/mean of object
        radii and of segment step lengths.
    """

    max_angle_dev_deg: float = 30.0
    max_angle_std_deg: float = 45.0
    max_radius_rel_std: float = 0.5
    max_distance_rel_std: float = 0.5

    def __post_init__(self):
        for name in (
            "max_angle_dev_deg",
            "max_angle_std_deg",
            "max_radius_rel_std",
            "max_distance_rel_std",
        ):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be positive")


@dataclass
class Trajectory:
    """An ordered run of objects in strictly consecutive frames."""

    objects: list[DetectedObject]
    segment_distances: np.ndarray = field(repr=False)
    segment_angles: np.ndarray = field(repr=False)

    @classmethod
    def from_objects(cls, objects: list[DetectedObject]) -> "Trajectory":
        if len(objects) < 2:
            raise InvalidInputError("a trajectory needs at least two objects")
        frames = [obj.frame for obj in objects]
        if any(b - a != 1 for a, b in zip(frames, frames[1:])):
            raise InvalidInputError(f"frame indices not consecutive: {frames}")
        distances, angles = segment_geometry(objects)
        return cls(objects=objects, segment_distances=distances, segment_angles=angles)

    def __len__(self) -> int:
        return len(self.objects)

    @property
    def radii(self) -> np.ndarray:
        return np.array([obj.radius for obj in self.objects])


@dataclass(frozen=True)
class MobilityEstimate:
    """Error-weighted mobility of one trajectory."""

    mu: float
    sigma_mu: float
    c_constant: float
    n_segments: int


@dataclass(frozen=True)
class KinematicsSummary:
    mean_velocity: float
    velocity_std: float
    mean_diameter: float
    diameter_std: float


def segment_geometry(objects: list[DetectedObject]) -> tuple[np.ndarray, np.ndarray]:
    """Step lengths and directions (degrees in [0, 360)) between consecutive objects."""
    xs = np.array([obj.x for obj in objects])
    ys = np.array([obj.y for obj in objects])
    dx = np.diff(xs)
    dy = np.diff(ys)
    distances = np.hypot(dx, dy)
    angles = np.degrees(np.arctan2(dy, dx)) % 360.0
    return distances, angles


def wrap_angle(delta_deg: float) -> float:
    """Fold an angle difference into (-180, 180]."""
    return float((delta_deg + 180.0) % 360.0 - 180.0)


def circular_mean(angles_deg: np.ndarray) -> float:
    """Direction-aware mean angle in [0, 360)."""
    rad = np.radians(angles_deg)
    return float(np.degrees(math.atan2(np.sin(rad).sum(), np.cos(rad).sum())) % 360.0)


def _rel_std(values: np.ndarray) -> float:
    mean = values.mean()
    std = values.std()
    if std == 0.0:
        return 0.0
    if mean == 0.0:
        return float("inf")
    return float(std / abs(mean))


@dataclass(frozen=True)
class PathStats:
    max_angle_dev_deg: float
    angle_std_deg: float
    radius_rel_std: float
    distance_rel_std: float


def path_stats(
    radii: np.ndarray, distances: np.ndarray, angles: np.ndarray
) -> PathStats:
    """Consistency statistics of one fragment (angles about the circular mean)."""
    if angles.size == 0:
        return PathStats(0.0, 0.0, 0.0, 0.0)
    mean_dir = circular_mean(angles)
    devs = np.array([wrap_angle(a - mean_dir) for a in angles])
    return PathStats(
        max_angle_dev_deg=float(np.abs(devs).max()),
        angle_std_deg=float(np.sqrt(np.mean(devs * devs))),
        radius_rel_std=_rel_std(radii),
        distance_rel_std=_rel_std(distances),
    )


def satisfies(stats: PathStats, limits: PlausibilityLimits) -> bool:
    return (
        stats.max_angle_dev_deg <= limits.max_angle_dev_deg
        and stats.angle_std_deg <= limits.max_angle_std_deg
        and stats.radius_rel_std <= limits.max_radius_rel_std
        and stats.distance_rel_std <= limits.max_distance_rel_std
    )


def _walk_split(
    objects: list[DetectedObject],
    distances: np.ndarray,
    angles: np.ndarray,
    limits: PlausibilityLimits,
) -> list[list[DetectedObject]]:
    """First pass: walk the path with running statistics, reset at each split.

    A segment that deviates from the running mean direction by more than the
    angle limit, or that pushes any running spread past its cap, closes the
    current fragment; the offending segment itself connects the fragments and
    is dropped.
    """
    radii = np.array([obj.radius for obj in objects])
    fragments = []
    start = 0
    for i in range(len(objects) - 1):
        frag_angles = angles[start:i]
        if frag_angles.size > 0:
            dev = abs(wrap_angle(angles[i] - circular_mean(frag_angles)))
            if dev > limits.max_angle_dev_deg:
                fragments.append(objects[start : i + 1])
                start = i + 1
                continue
        stats = path_stats(radii[start : i + 2], distances[start : i + 1], angles[start : i + 1])
        if not satisfies(stats, limits):
            fragments.append(objects[start : i + 1])
            start = i + 1
    fragments.append(objects[start:])
    return fragments


def _split_until_sound(
    objects: list[DetectedObject],
    limits: PlausibilityLimits,
) -> list[list[DetectedObject]]:
    """Second pass: re-measure fragments and split at the worst offender until
    every fragment satisfies all limits."""
    if len(objects) < 3:
        return [objects]
    distances, angles = segment_geometry(objects)
    radii = np.array([obj.radius for obj in objects])
    stats = path_stats(radii, distances, angles)
    if satisfies(stats, limits):
        return [objects]
    mean_dir = circular_mean(angles)
    devs = np.abs([wrap_angle(a - mean_dir) for a in angles])
    if stats.max_angle_dev_deg > limits.max_angle_dev_deg or (
        stats.angle_std_deg > limits.max_angle_std_deg
    ):
        k = int(np.argmax(devs))
    elif stats.radius_rel_std > limits.max_radius_rel_std:
        # cut at the largest radius step so both regimes end up on one side
        k = int(np.argmax(np.abs(np.diff(radii))))
    else:
        k = int(np.argmax(np.abs(distances - distances.mean())))
    left = objects[: k + 1]
    right = objects[k + 1 :]
    return _split_until_sound(left, limits) + _split_until_sound(right, limits)


def plausibility_split(
    path: list[DetectedObject],
    limits: PlausibilityLimits,
    min_track_length: int,
) -> list[Trajectory]:
    """Split a raw path wherever its geometry stops being self-consistent.

    Fragments that end up shorter than min_track_length are dropped; every
    returned trajectory satisfies all four limits when re-measured.
    """
    if len(path) < 2:
        return []
    distances, angles = segment_geometry(path)
    sound: list[list[DetectedObject]] = []
    for fragment in _walk_split(path, distances, angles, limits):
        if len(fragment) < 2:
            continue
        sound.extend(_split_until_sound(fragment, limits))
    return [
        Trajectory.from_objects(fragment)
        for fragment in sound
        if len(fragment) >= max(min_track_length, 2)
    ]


def kinematics(traj: Trajectory, frame_rate: float, scale: float) -> KinematicsSummary:
    """Velocity and size summary in physical units.

    frame_rate is frames per second, scale the pixel pitch (length units per
    pixel); velocities are step length * scale * frame_rate.
    """
    if frame_rate <= 0 or scale <= 0:
        raise InvalidInputError("frame_rate and scale must be positive")
    velocities = traj.segment_distances * scale * frame_rate
    diameters = 2.0 * traj.radii * scale
    return KinematicsSummary(
        mean_velocity=float(velocities.mean()),
        velocity_std=float(velocities.std()),
        mean_diameter=float(diameters.mean()),
        diameter_std=float(diameters.std()),
    )


def weighted_mean_fit(
    y: np.ndarray, sigma_y: np.ndarray, c_constant: float
) -> tuple[float, float]:
    """Closed-form minimizer of sum(((y - mu*c) / sigma_y)^2) and its error.

    mu = (1/c) * sum(y/sigma^2) / sum(1/sigma^2); the inverse variance of mu
    is c^2 * sum(1/sigma^2).
    """
    if c_constant == 0:
        raise InvalidInputError("the motion constant must be nonzero")
    inv_var = 1.0 / (sigma_y * sigma_y)
    mu = float((y * inv_var).sum() / inv_var.sum() / c_constant)
    sigma_mu = float(1.0 / (abs(c_constant) * np.sqrt(inv_var.sum())))
    return mu, sigma_mu


def estimate_mobility(
    traj: Trajectory, c_constant: float = 1.0, pixel_sigma: float = 1.0
) -> MobilityEstimate:
    """Fit the per-trajectory mobility from radius * step-length observations.

    Each segment contributes y = R * s with an error sigma_y =
    pixel_sigma * (s + R): the radius and step measurements share the same
    fully correlated 1 px-scale error, so their contributions add linearly.
    """
    if pixel_sigma <= 0:
        raise InvalidInputError("pixel_sigma must be positive")
    radii = traj.radii[:-1]
    distances = traj.segment_distances
    y = radii * distances
    spread = distances + radii
    if np.any(spread == 0):
        raise DegenerateErrorModelError("segment with s + R = 0 has zero error estimate")
    sigma_y = pixel_sigma * spread
    mu, sigma_mu = weighted_mean_fit(y, sigma_y, c_constant)
    return MobilityEstimate(
        mu=mu,
        sigma_mu=sigma_mu,
        c_constant=c_constant,
        n_segments=int(distances.size),
    )
