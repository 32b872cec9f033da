"""Exception types raised across the tracking pipeline."""


class TrackingError(Exception):
    """Base class for all ringtrack errors."""


class IngestionError(TrackingError):
    """An input image file could not be read or decoded."""


class InvalidInputError(TrackingError):
    """An input violates a precondition (bad dimensions, kernel too large, ...)."""


class DegenerateObjectError(TrackingError):
    """A blob has no usable intensity mass (centroid undefined)."""


class RadiusUndefinedError(TrackingError):
    """No gradient support in the edge annulus; the object is dropped."""


class NoDominantAngleError(TrackingError):
    """No edges available to build the displacement-angle histogram."""


class DegenerateErrorModelError(TrackingError):
    """A segment with s + R = 0 makes the fit error model singular."""


class GenerationError(TrackingError):
    """Synthetic placement failed (density too high for rejection sampling)."""


class ConfigError(TrackingError):
    """A run configuration file or override is invalid."""
