"""Command line entry points for the track and bench workflows."""

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .config import _FIELDS, RunConfig, apply_overrides, load_config_file
from .errors import TrackingError
from .imaging import list_frame_files, load_frame
from .linking import LinkEdge, flatten_objects
from .pipeline import TrackResult, track_frames
from .synthbench import (
    SWEEP_COLUMNS,
    cell_seed,
    config_for_density,
    generate_sequence,
    run_sweep,
    write_sweep_csv,
    write_truth_csv,
)
from .trajectory import Trajectory, estimate_mobility, kinematics

# --check thresholds: near-complete recognition is expected for identical
# objects at low density and steps of at most one diameter per frame
CHECK_MAX_DENSITY = 0.0101
CHECK_MAX_STEP = 1.0
CHECK_MIN_OBJECT_RATIO = 0.95
CHECK_MIN_TRAJECTORY_RATIO = 0.90

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_TRAJECTORIES = 2
EXIT_CHECK_FAILED = 3


def _flag_name(field: str) -> str:
    return "--" + field.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringtrack",
        description="Track circular/ring-shaped objects in grayscale frame "
        "sequences, or benchmark the tracker on synthetic sequences.",
    )
    parser.add_argument("--config", help="INI config file; flags override its values")
    for field, (_, kind) in _FIELDS.items():
        flag = _flag_name(field)
        if kind == "bool":
            parser.add_argument(flag, dest=field, action="store_const", const=True,
                                default=None)
        elif kind == "int":
            parser.add_argument(flag, dest=field, type=int, default=None)
        elif kind == "float":
            parser.add_argument(flag, dest=field, type=float, default=None)
        elif kind == "float_list":
            parser.add_argument(
                flag, dest=field, default=None,
                type=lambda raw: tuple(float(p) for p in raw.replace(",", " ").split()),
            )
        elif kind == "str_list":
            parser.add_argument(
                flag, dest=field, default=None,
                type=lambda raw: tuple(raw.replace(",", " ").split()),
            )
        else:
            parser.add_argument(flag, dest=field, default=None)
    return parser


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    tmp.replace(path)


def _objects_csv(result: TrackResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["frame", "x", "y", "radius_px", "pixel_count", "match_index"])
    for frame_objects in result.objects_by_frame:
        for obj in frame_objects:
            writer.writerow(
                [obj.frame, repr(obj.x), repr(obj.y), repr(obj.radius),
                 obj.pixel_count, repr(obj.match_index)]
            )
    return buf.getvalue()


def _trajectories_csv(trajectories: list[Trajectory]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["track_id", "frame", "x", "y", "radius_px",
         "segment_distance_px", "segment_angle_deg"]
    )
    for track_id, traj in enumerate(trajectories):
        for i, obj in enumerate(traj.objects):
            if i < len(traj.segment_distances):
                tail = [repr(float(traj.segment_distances[i])),
                        repr(float(traj.segment_angles[i]))]
            else:
                tail = ["", ""]
            writer.writerow(
                [track_id, obj.frame, repr(obj.x), repr(obj.y), repr(obj.radius)] + tail
            )
    return buf.getvalue()


def _edges_csv(edges: list[LinkEdge], result: TrackResult) -> str:
    flat, frames = flatten_objects(result.objects_by_frame)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["frame", "from_id", "to_id", "s", "dR", "phi", "cost"])
    for edge in edges:
        writer.writerow(
            [int(frames[edge.src]), edge.src, edge.dst, repr(edge.distance),
             repr(edge.radius_dev), repr(edge.angle_deg), repr(edge.cost)]
        )
    return buf.getvalue()


def _summary_json(cfg: RunConfig, result: TrackResult) -> str:
    params = cfg.track_params()
    tracks = []
    for track_id, traj in enumerate(result.trajectories):
        kin = kinematics(traj, params.frame_rate, params.scale)
        mob = estimate_mobility(traj, params.c_constant, params.pixel_sigma)
        tracks.append(
            {
                "track_id": track_id,
                "n_objects": len(traj),
                "n_segments": mob.n_segments,
                "first_frame": traj.objects[0].frame,
                "last_frame": traj.objects[-1].frame,
                "mean_velocity": kin.mean_velocity,
                "velocity_std": kin.velocity_std,
                "mean_diameter": kin.mean_diameter,
                "diameter_std": kin.diameter_std,
                "mobility": mob.mu,
                "mobility_sigma": mob.sigma_mu,
            }
        )
    summary = {
        "config": cfg.echo(),
        "n_frames": len(result.objects_by_frame),
        "n_objects": result.n_objects,
        "n_raw_paths": len(result.raw_paths),
        "n_trajectories": len(result.trajectories),
        "tracks": tracks,
    }
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def _resolve_inputs(cfg: RunConfig) -> list[Path]:
    if cfg.input_list:
        list_path = Path(cfg.input_list)
        if not list_path.is_file():
            raise TrackingError(f"input list file not found: {list_path}")
        files = [Path(line.strip()) for line in list_path.read_text().splitlines()
                 if line.strip()]
        missing = [str(f) for f in files if not f.is_file()]
        if missing:
            raise TrackingError(f"missing input frames: {', '.join(missing)}")
        return files
    if cfg.input:
        files = list_frame_files(cfg.input)
        if not files:
            raise TrackingError(f"no input frames match '{cfg.input}'")
        return files
    raise TrackingError("no input given: set --input or --input-list")


def run_track(cfg: RunConfig) -> int:
    files = _resolve_inputs(cfg)
    frames = [load_frame(f) for f in files]
    params = cfg.track_params()
    result = track_frames(frames, params)

    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(out_dir / "objects.csv", _objects_csv(result))
    _atomic_write(out_dir / "trajectories.csv", _trajectories_csv(result.trajectories))
    _atomic_write(out_dir / "summary.json", _summary_json(cfg, result))
    if cfg.dump_edges:
        _atomic_write(out_dir / "edges.csv", _edges_csv(result.edges, result))
    return EXIT_OK if result.trajectories else EXIT_NO_TRAJECTORIES


def _check_rows(rows) -> list[str]:
    failures = []
    for row in rows:
        if row.mode != "identical" or row.density > CHECK_MAX_DENSITY:
            continue
        if row.step_multiple > CHECK_MAX_STEP:
            continue
        cell = f"density={row.density} step={row.step_multiple} mode={row.mode}"
        if row.obj_ratio_mean < CHECK_MIN_OBJECT_RATIO:
            failures.append(
                f"{cell}: object ratio {row.obj_ratio_mean:.3f} < {CHECK_MIN_OBJECT_RATIO}"
            )
        if row.traj_ratio_mean < CHECK_MIN_TRAJECTORY_RATIO:
            failures.append(
                f"{cell}: trajectory ratio {row.traj_ratio_mean:.3f} < {CHECK_MIN_TRAJECTORY_RATIO}"
            )
    return failures


def run_bench(cfg: RunConfig) -> int:
    rows = run_sweep(
        list(cfg.densities),
        list(cfg.step_multiples),
        list(cfg.modes),
        cfg.replicates,
        params=lambda density, step, mode: cfg.track_params(
            bench_step=step * cfg.mean_diameter
        ),
        base_seed=cfg.seed,
        mean_diameter=cfg.mean_diameter,
        n_frames=cfg.n_frames,
    )
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, out_dir / "report.csv")

    if cfg.dump_truth:
        first = config_for_density(
            cfg.densities[0],
            step_multiple=cfg.step_multiples[0],
            variation_mode=cfg.modes[0],
            seed=cell_seed(cfg.seed, cfg.densities[0], cfg.modes[0], 0),
            mean_diameter=cfg.mean_diameter,
            n_frames=cfg.n_frames,
        )
        _, truth = generate_sequence(first)
        write_truth_csv(truth, out_dir / "truth.csv")

    if cfg.check:
        failures = _check_rows(rows)
        check = {
            "passed": not failures,
            "failures": failures,
            "thresholds": {
                "min_object_ratio": CHECK_MIN_OBJECT_RATIO,
                "min_trajectory_ratio": CHECK_MIN_TRAJECTORY_RATIO,
                "max_density": CHECK_MAX_DENSITY,
                "max_step_multiple": CHECK_MAX_STEP,
            },
        }
        _atomic_write(out_dir / "check.json",
                      json.dumps(check, indent=2, sort_keys=True) + "\n")
        if failures:
            for failure in failures:
                print(f"check failed: {failure}", file=sys.stderr)
            return EXIT_CHECK_FAILED
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig()
        if args.config:
            cfg = load_config_file(args.config, cfg)
        overrides = {field: getattr(args, field) for field in _FIELDS}
        cfg = apply_overrides(cfg, overrides)
        if cfg.mode == "track":
            return run_track(cfg)
        if cfg.mode == "bench":
            return run_bench(cfg)
        print(f"error: unknown mode '{cfg.mode}' (expected track or bench)",
              file=sys.stderr)
        return EXIT_ERROR
    except (TrackingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
