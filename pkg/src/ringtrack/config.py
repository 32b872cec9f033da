"""Run configuration: defaults, config-file parsing and flag overrides.

The config file is INI-style with sections mirroring the pipeline stages
(run, imaging, detection, linking, trajectory, bench). Size-dependent values
left unset are derived from the approximate object size at resolve time.
"""

import configparser
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .detection import ShapeFilterParams
from .errors import ConfigError
from .imaging import BandpassParams
from .linking import GraphWeights
from .pipeline import TrackParams
from .synthbench import BENCH_CIRCULARITY_TOL
from .trajectory import PlausibilityLimits


@dataclass(frozen=True)
class RunConfig:
    # run
    mode: str = "track"
    input: str | None = None
    input_list: str | None = None
    output_dir: str = "ringtrack_out"
    seed: int = 0
    check: bool = False
    dump_edges: bool = False
    dump_truth: bool = False
    # imaging
    object_size: int = 5
    noise_size: float = 1.0
    threshold: float = 0.25
    invert: bool = False
    # detection
    shape: str = "circle"
    min_radius: float | None = None  # default 0.25 * object_size
    max_radius: float | None = None  # default 2.0 * object_size
    # default 0.3; the bench regime widens it for ~5 px objects
    circularity_tol: float | None = None
    center_ratio_max: float = 5.0
    match_index_min: float = 0.5
    # linking
    distance_weight: float = 1.0
    radius_weight: float = 1.0
    angle_weight: float = 2.0
    max_distance: float | None = None  # default 10 * object_size
    min_diameter: float | None = None  # default 0.5 * object_size
    min_track_length: int = 5
    # trajectory
    max_angle_dev_deg: float = 30.0
    max_angle_std_deg: float = 45.0
    max_radius_rel_std: float = 0.5
    max_distance_rel_std: float = 0.5
    frame_rate: float = 1.0
    scale: float = 1.0
    c_constant: float = 1.0
    pixel_sigma: float = 1.0
    # bench
    densities: tuple = (0.001, 0.01, 0.05, 0.10)
    step_multiples: tuple = (1.0,)
    modes: tuple = ("identical",)
    replicates: int = 3
    mean_diameter: float = 5.0
    n_frames: int = 20

    def resolved(self, bench_step: float | None = None) -> "RunConfig":
        """Fill derived defaults from object_size.

        With bench_step set (synthetic-benchmark mode, per-frame travel in
        px), the search radius follows the known step length and the
        circularity tolerance uses the small-object headroom.
        """
        w = float(self.object_size)
        updates = {}
        if self.min_radius is None:
            updates["min_radius"] = 0.25 * w
        if self.max_radius is None:
            updates["max_radius"] = 2.0 * w
        if self.max_distance is None:
            if bench_step is None:
                updates["max_distance"] = 10.0 * w
            else:
                updates["max_distance"] = max(2.0 * bench_step, self.mean_diameter)
        if self.min_diameter is None:
            updates["min_diameter"] = 0.5 * w
        if self.circularity_tol is None:
            updates["circularity_tol"] = 0.3 if bench_step is None else BENCH_CIRCULARITY_TOL
        return replace(self, **updates) if updates else self

    def track_params(self, bench_step: float | None = None) -> TrackParams:
        cfg = self.resolved(bench_step)
        return TrackParams(
            bandpass=BandpassParams(
                object_size=cfg.object_size,
                noise_size=cfg.noise_size,
                threshold=cfg.threshold,
                invert=cfg.invert,
            ),
            shape=ShapeFilterParams(
                shape=cfg.shape,
                min_radius=cfg.min_radius,
                max_radius=cfg.max_radius,
                circularity_tol=cfg.circularity_tol,
                center_ratio_max=cfg.center_ratio_max,
                match_index_min=cfg.match_index_min,
            ),
            weights=GraphWeights(
                distance_weight=cfg.distance_weight,
                radius_weight=cfg.radius_weight,
                angle_weight=cfg.angle_weight,
                max_distance=cfg.max_distance,
                min_diameter=cfg.min_diameter,
                min_track_length=cfg.min_track_length,
            ),
            limits=PlausibilityLimits(
                max_angle_dev_deg=cfg.max_angle_dev_deg,
                max_angle_std_deg=cfg.max_angle_std_deg,
                max_radius_rel_std=cfg.max_radius_rel_std,
                max_distance_rel_std=cfg.max_distance_rel_std,
            ),
            frame_rate=cfg.frame_rate,
            scale=cfg.scale,
            c_constant=cfg.c_constant,
            pixel_sigma=cfg.pixel_sigma,
        )

    def echo(self) -> dict:
        """Fully resolved key/value mapping for the summary, reproducibility-grade."""
        data = asdict(self.resolved())
        for key in ("densities", "step_multiples", "modes"):
            data[key] = list(data[key])
        return data


# field name -> (section, parser kind)
_FIELDS: dict[str, tuple[str, str]] = {
    "mode": ("run", "str"),
    "input": ("run", "str"),
    "input_list": ("run", "str"),
    "output_dir": ("run", "str"),
    "seed": ("run", "int"),
    "check": ("run", "bool"),
    "dump_edges": ("run", "bool"),
    "dump_truth": ("run", "bool"),
    "object_size": ("imaging", "int"),
    "noise_size": ("imaging", "float"),
    "threshold": ("imaging", "float"),
    "invert": ("imaging", "bool"),
    "shape": ("detection", "str"),
    "min_radius": ("detection", "float"),
    "max_radius": ("detection", "float"),
    "circularity_tol": ("detection", "float"),
    "center_ratio_max": ("detection", "float"),
    "match_index_min": ("detection", "float"),
    "distance_weight": ("linking", "float"),
    "radius_weight": ("linking", "float"),
    "angle_weight": ("linking", "float"),
    "max_distance": ("linking", "float"),
    "min_diameter": ("linking", "float"),
    "min_track_length": ("linking", "int"),
    "max_angle_dev_deg": ("trajectory", "float"),
    "max_angle_std_deg": ("trajectory", "float"),
    "max_radius_rel_std": ("trajectory", "float"),
    "max_distance_rel_std": ("trajectory", "float"),
    "frame_rate": ("trajectory", "float"),
    "scale": ("trajectory", "float"),
    "c_constant": ("trajectory", "float"),
    "pixel_sigma": ("trajectory", "float"),
    "densities": ("bench", "float_list"),
    "step_multiples": ("bench", "float_list"),
    "modes": ("bench", "str_list"),
    "replicates": ("bench", "int"),
    "mean_diameter": ("bench", "float"),
    "n_frames": ("bench", "int"),
}


def _parse_value(kind: str, raw: str, key: str):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            lowered = raw.strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "float_list":
            return tuple(float(part) for part in raw.replace(",", " ").split())
        if kind == "str_list":
            return tuple(part for part in raw.replace(",", " ").split())
        return raw.strip()
    except ValueError as exc:
        raise ConfigError(f"invalid value for key '{key}': {raw!r}") from exc


def load_config_file(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    """Apply a config file on top of defaults (or the given base)."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc

    cfg = base or RunConfig()
    updates = {}
    known_sections = {section for section, _ in _FIELDS.values()}
    for section in parser.sections():
        if section not in known_sections:
            raise ConfigError(f"unknown config section '{section}' in {path}")
        for key, raw in parser.items(section):
            field = key.strip()
            if field not in _FIELDS or _FIELDS[field][0] != section:
                raise ConfigError(f"unknown config key '{section}.{field}' in {path}")
            updates[field] = _parse_value(_FIELDS[field][1], raw, f"{section}.{field}")
    return replace(cfg, **updates)


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Flag values (already typed) override config-file values."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **updates) if updates else cfg
