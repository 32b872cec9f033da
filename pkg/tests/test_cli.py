"""CLI workflows: track and bench modes, exit codes, artifact contracts."""

import csv
import json

import numpy as np
import pytest
from PIL import Image

from ringtrack.cli import (
    EXIT_CHECK_FAILED,
    EXIT_ERROR,
    EXIT_NO_TRAJECTORIES,
    EXIT_OK,
    main,
)
from ringtrack.synthbench import config_for_density, generate_sequence


@pytest.fixture(scope="module")
def frame_dir(tmp_path_factory):
    path = tmp_path_factory.mktemp("frames")
    frames, _ = generate_sequence(config_for_density(0.01, seed=5))
    for i, frame in enumerate(frames):
        Image.fromarray((frame * 255).astype(np.uint8)).save(path / f"f_{i:03d}.png")
    return path


BENCH_LIKE = ["--circularity-tol", "0.5", "--max-distance", "10"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestTrack:
    def test_full_run(self, frame_dir, tmp_path):
        out = tmp_path / "out"
        code = main(["--mode", "track", "--input", str(frame_dir),
                     "--output-dir", str(out)] + BENCH_LIKE)
        assert code == EXIT_OK
        assert (out / "objects.csv").is_file()
        assert (out / "trajectories.csv").is_file()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["n_trajectories"] >= 1
        rows = read_csv(out / "trajectories.csv")
        assert rows[0] == ["track_id", "frame", "x", "y", "radius_px",
                           "segment_distance_px", "segment_angle_deg"]
        # row count cross-check against per-track object counts
        assert len(rows) - 1 == sum(t["n_objects"] for t in summary["tracks"])

    def test_summary_echoes_resolved_config(self, frame_dir, tmp_path):
        out = tmp_path / "out"
        main(["--mode", "track", "--input", str(frame_dir),
              "--output-dir", str(out)] + BENCH_LIKE)
        config = json.loads((out / "summary.json").read_text())["config"]
        assert config["max_distance"] == 10.0
        assert config["min_diameter"] == 2.5  # derived from object_size 5
        assert config["threshold"] == 0.25
        assert config["seed"] == 0

    def test_empty_input_dir_exits_one(self, tmp_path, capsys):
        out = tmp_path / "out"
        empty = tmp_path / "empty"
        empty.mkdir()
        code = main(["--mode", "track", "--input", str(empty),
                     "--output-dir", str(out)])
        assert code == EXIT_ERROR
        assert str(empty) in capsys.readouterr().err

    def test_missing_input_exits_one(self, tmp_path, capsys):
        code = main(["--mode", "track", "--output-dir", str(tmp_path / "o")])
        assert code == EXIT_ERROR
        assert "input" in capsys.readouterr().err

    def test_degenerate_threshold_exits_two_with_header(self, frame_dir, tmp_path):
        out = tmp_path / "out"
        code = main(["--mode", "track", "--input", str(frame_dir),
                     "--output-dir", str(out), "--threshold", "0.99"])
        assert code == EXIT_NO_TRAJECTORIES
        rows = read_csv(out / "trajectories.csv")
        assert len(rows) == 1  # header only

    def test_input_list_order_respected(self, frame_dir, tmp_path):
        files = sorted(frame_dir.glob("*.png"))
        listing = tmp_path / "frames.txt"
        listing.write_text("\n".join(str(f) for f in files[:6]))
        out = tmp_path / "out"
        code = main(["--mode", "track", "--input-list", str(listing),
                     "--output-dir", str(out)] + BENCH_LIKE)
        assert code in (EXIT_OK, EXIT_NO_TRAJECTORIES)
        objects = read_csv(out / "objects.csv")
        frames_seen = {int(r[0]) for r in objects[1:]}
        assert frames_seen <= set(range(6))

    def test_dump_edges(self, frame_dir, tmp_path):
        out = tmp_path / "out"
        main(["--mode", "track", "--input", str(frame_dir),
              "--output-dir", str(out), "--dump-edges"] + BENCH_LIKE)
        rows = read_csv(out / "edges.csv")
        assert rows[0] == ["frame", "from_id", "to_id", "s", "dR", "phi", "cost"]
        assert len(rows) > 1

    def test_glob_input(self, frame_dir, tmp_path):
        out = tmp_path / "out"
        code = main(["--mode", "track", "--input", str(frame_dir / "f_*.png"),
                     "--output-dir", str(out)] + BENCH_LIKE)
        assert code == EXIT_OK


class TestConfigFile:
    def test_config_file_applied_and_flag_wins(self, frame_dir, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "[imaging]\nthreshold = 0.30\nobject_size = 5\n"
            "[linking]\nmax_distance = 10\n"
            "[detection]\ncircularity_tol = 0.5\n"
        )
        out = tmp_path / "out"
        code = main(["--mode", "track", "--config", str(cfg),
                     "--input", str(frame_dir), "--output-dir", str(out),
                     "--threshold", "0.2"])
        assert code == EXIT_OK
        echoed = json.loads((out / "summary.json").read_text())["config"]
        assert echoed["threshold"] == 0.2  # flag beats config file
        assert echoed["max_distance"] == 10.0  # config beats default

    def test_unknown_key_named_in_error(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("[imaging]\nobject_sizes = 5\n")
        code = main(["--mode", "track", "--config", str(cfg), "--input", "x"])
        assert code == EXIT_ERROR
        assert "object_sizes" in capsys.readouterr().err

    def test_bad_value_named_in_error(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("[imaging]\nthreshold = huge\n")
        code = main(["--mode", "track", "--config", str(cfg), "--input", "x"])
        assert code == EXIT_ERROR
        assert "threshold" in capsys.readouterr().err

    def test_unknown_mode(self, capsys):
        assert main(["--mode", "fly"]) == EXIT_ERROR
        assert "fly" in capsys.readouterr().err


class TestBench:
    def test_single_cell(self, tmp_path):
        out = tmp_path / "bench"
        code = main(["--mode", "bench", "--densities", "0.01",
                     "--step-multiples", "1.0", "--modes", "identical",
                     "--replicates", "1", "--output-dir", str(out)])
        assert code == EXIT_OK
        rows = read_csv(out / "report.csv")
        assert len(rows) == 2

    def test_check_passing(self, tmp_path):
        out = tmp_path / "bench"
        code = main(["--mode", "bench", "--densities", "0.01",
                     "--replicates", "2", "--check", "--output-dir", str(out)])
        assert code == EXIT_OK
        check = json.loads((out / "check.json").read_text())
        assert check["passed"] is True

    def test_check_failing_names_cell(self, tmp_path, capsys):
        out = tmp_path / "bench"
        # an impossible track-length requirement drives trajectory recognition
        # to zero in a checked cell
        code = main(["--mode", "bench", "--densities", "0.01",
                     "--replicates", "1", "--check", "--min-track-length", "21",
                     "--output-dir", str(out)])
        assert code == EXIT_CHECK_FAILED
        err = capsys.readouterr().err
        assert "density=0.01" in err
        check = json.loads((out / "check.json").read_text())
        assert check["passed"] is False

    def test_dump_truth(self, tmp_path):
        out = tmp_path / "bench"
        main(["--mode", "bench", "--densities", "0.01", "--replicates", "1",
              "--dump-truth", "--output-dir", str(out)])
        rows = read_csv(out / "truth.csv")
        assert rows[0][0] == "track_id_true"
        assert len(rows) > 10


class TestDeterminism:
    def test_track_outputs_byte_identical(self, frame_dir, tmp_path):
        out = tmp_path / "out"
        artifacts = ("objects.csv", "trajectories.csv", "summary.json")
        snapshots = []
        for _ in range(2):
            code = main(["--mode", "track", "--input", str(frame_dir),
                         "--output-dir", str(out)] + BENCH_LIKE)
            assert code == EXIT_OK
            snapshots.append({a: (out / a).read_bytes() for a in artifacts})
        assert snapshots[0] == snapshots[1]

    def test_bench_report_byte_identical(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(["--mode", "bench", "--densities", "0.01", "--replicates", "2",
                  "--seed", "9", "--output-dir", str(out)])
            outs.append(out)
        assert (outs[0] / "report.csv").read_bytes() == (outs[1] / "report.csv").read_bytes()
