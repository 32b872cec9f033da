"""Synthetic sequence generation and recognition scoring."""

import math

import numpy as np
import pytest

from ringtrack import synthbench
from ringtrack.detection import DetectedObject
from ringtrack.errors import GenerationError, InvalidInputError
from ringtrack.synthbench import (
    GroundTruth,
    MatchResult,
    SynthConfig,
    TruthObject,
    cell_seed,
    config_for_density,
    evaluate_sequence,
    generate_sequence,
    match_objects,
    run_sweep,
    score_trajectories,
    write_sweep_csv,
)
from ringtrack.trajectory import Trajectory


def truth_as_detections(truth: GroundTruth) -> list[list[DetectedObject]]:
    frames = []
    for frame_objects in truth.objects_by_frame:
        frames.append(
            [
                DetectedObject(
                    frame=t.frame, x=t.x, y=t.y, radius=t.radius, pixel_count=20,
                    match_index=0.9, pixel_distances=np.array([1.0]),
                )
                for t in frame_objects
            ]
        )
    return frames


class TestConfig:
    def test_density_window(self):
        for density in (0.001, 0.01, 0.05, 0.10):
            cfg = config_for_density(density)
            assert cfg.density == pytest.approx(density, rel=0.25)
            assert 125 <= cfg.frame_width <= 400

    def test_paper_regime_bounds(self):
        dense = config_for_density(0.10)
        assert dense.frame_width == 125
        assert dense.n_objects == 80
        sparse = config_for_density(0.001)
        assert sparse.frame_width == 400

    def test_invalid_mode_rejected(self):
        with pytest.raises(InvalidInputError):
            SynthConfig(variation_mode="wobbly")

    def test_out_of_range_density_rejected(self):
        with pytest.raises(InvalidInputError):
            SynthConfig(frame_height=400, frame_width=400, n_objects=2)


class TestGenerateSequence:
    def test_deterministic_per_seed(self):
        cfg = config_for_density(0.01, seed=42)
        frames_a, truth_a = generate_sequence(cfg)
        frames_b, truth_b = generate_sequence(cfg)
        assert all(np.array_equal(a, b) for a, b in zip(frames_a, frames_b))
        assert truth_a == truth_b

    def test_different_seed_differs(self):
        a, _ = generate_sequence(config_for_density(0.01, seed=1))
        b, _ = generate_sequence(config_for_density(0.01, seed=2))
        assert not np.array_equal(a[0], b[0])

    def test_identical_mode_diameters(self):
        _, truth = generate_sequence(config_for_density(0.01, seed=3))
        for frame_objects in truth.objects_by_frame:
            for obj in frame_objects:
                assert obj.radius == 2.5

    @pytest.mark.parametrize("mode", ["identical", "between_tracks", "within_track"])
    def test_no_overlap_audit(self, mode):
        cfg = config_for_density(0.08, variation_mode=mode, seed=17)
        _, truth = generate_sequence(cfg)
        for frame_objects in truth.objects_by_frame:
            for i, a in enumerate(frame_objects):
                for b in frame_objects[i + 1 :]:
                    gap = math.hypot(a.x - b.x, a.y - b.y) - (a.radius + b.radius)
                    assert gap >= -1e-9

    def test_track_count_and_retirement(self):
        cfg = config_for_density(0.01, seed=5)
        _, truth = generate_sequence(cfg)
        counts = [len(f) for f in truth.objects_by_frame]
        assert counts[0] == cfg.n_objects
        assert all(b <= a for a, b in zip(counts, counts[1:]))  # no respawn
        # a retired track never reappears
        for objs in truth.track_objects().values():
            frames = [o.frame for o in objs]
            assert frames == list(range(frames[0], frames[-1] + 1))

    def test_between_tracks_varies_between_not_within(self):
        cfg = config_for_density(0.01, variation_mode="between_tracks", seed=9)
        _, truth = generate_sequence(cfg)
        per_track_radii = {
            tid: {o.radius for o in objs}
            for tid, objs in truth.track_objects().items()
        }
        assert all(len(radii) == 1 for radii in per_track_radii.values())
        distinct = {next(iter(r)) for r in per_track_radii.values()}
        assert len(distinct) > 1

    def test_frame_too_small_raises(self):
        with pytest.raises(GenerationError):
            generate_sequence(
                SynthConfig(frame_height=12, frame_width=125, n_objects=3)
            )

    def test_placement_failure_reports_density(self, monkeypatch):
        monkeypatch.setattr(synthbench, "PLACEMENT_ATTEMPTS", 1)
        cfg = config_for_density(0.10, seed=0)
        with pytest.raises(GenerationError, match="density"):
            generate_sequence(cfg)


class TestMatchObjects:
    def test_perfect_match(self):
        _, truth = generate_sequence(config_for_density(0.01, seed=8))
        result = match_objects(truth_as_detections(truth), truth)
        assert result.object_ratio == 1.0
        assert result.false_positive_ratio == 0.0

    def test_spurious_detection_counts_as_false_positive(self):
        _, truth = generate_sequence(config_for_density(0.01, seed=8))
        detections = truth_as_detections(truth)
        detections[0].append(
            DetectedObject(frame=0, x=1.0, y=1.0, radius=2.5, pixel_count=20,
                           match_index=0.9, pixel_distances=np.array([1.0]))
        )
        result = match_objects(detections, truth)
        assert result.object_ratio == 1.0
        assert result.false_positive_ratio == pytest.approx(1.0 / truth.n_objects)

    def test_offset_beyond_tolerance_matches_nothing(self):
        _, truth = generate_sequence(config_for_density(0.01, seed=8))
        detections = truth_as_detections(truth)
        offset = [
            [DetectedObject(frame=d.frame, x=d.x + 3.6, y=d.y, radius=d.radius,
                            pixel_count=20, match_index=0.9,
                            pixel_distances=np.array([1.0]))
             for d in frame_dets]
            for frame_dets in detections
        ]
        result = match_objects(offset, truth, tolerance=2.5)
        assert result.object_ratio == 0.0

    def test_one_to_one(self):
        truth = GroundTruth(
            objects_by_frame=[[TruthObject(0, 0, 10.0, 10.0, 2.5)]],
            tracks=[],
        )
        detections = [[
            DetectedObject(frame=0, x=10.3, y=10.0, radius=2.5, pixel_count=20,
                           match_index=0.9, pixel_distances=np.array([1.0])),
            DetectedObject(frame=0, x=9.8, y=10.0, radius=2.5, pixel_count=20,
                           match_index=0.9, pixel_distances=np.array([1.0])),
        ]]
        result = match_objects(detections, truth, tolerance=2.5)
        assert len(result.pairs) == 1
        assert result.pairs[0][0].x == 9.8  # nearest one wins


def _track(track_id, frames, matched_pairs, truth_objects):
    objs = []
    for f in frames:
        det = DetectedObject(frame=f, x=float(f), y=float(track_id), radius=2.5,
                             pixel_count=20, match_index=0.9,
                             pixel_distances=np.array([1.0]))
        objs.append(det)
        t = TruthObject(track_id=track_id, frame=f, x=float(f), y=float(track_id),
                        radius=2.5)
        truth_objects.setdefault(f, []).append(t)
        matched_pairs.append((det, t))
    return objs


class TestScoreTrajectories:
    def _truth(self, truth_objects, n_frames):
        return GroundTruth(
            objects_by_frame=[truth_objects.get(f, []) for f in range(n_frames)],
            tracks=[],
        )

    def test_perfect_tracks(self):
        pairs, truth_objects = [], {}
        tracks = []
        for tid in range(3):
            objs = _track(tid, range(20), pairs, truth_objects)
            tracks.append(Trajectory.from_objects(objs))
        truth = self._truth(truth_objects, 20)
        matches = MatchResult(1.0, 0.0, pairs)
        score = score_trajectories(tracks, truth, matches)
        assert score.trajectory_ratio == 1.0
        assert score.fragmentation == 1.0

    def test_split_track_scores_half(self):
        pairs, truth_objects = [], {}
        objs = _track(0, range(20), pairs, truth_objects)
        fragments = [
            Trajectory.from_objects(objs[:10]),
            Trajectory.from_objects(objs[10:]),
        ]
        truth = self._truth(truth_objects, 20)
        matches = MatchResult(1.0, 0.0, pairs)
        score = score_trajectories(fragments, truth, matches)
        assert score.trajectory_ratio == 0.5
        assert score.fragmentation == 2.0

    def test_identity_swap_scores_below_one(self):
        pairs, truth_objects = [], {}
        objs_a = _track(0, range(20), pairs, truth_objects)
        objs_b = _track(1, range(20), pairs, truth_objects)
        # crossing swap: each found track carries half of each true track
        swapped = [
            Trajectory.from_objects(objs_a[:10] + objs_b[10:]),
            Trajectory.from_objects(objs_b[:10] + objs_a[10:]),
        ]
        truth = self._truth(truth_objects, 20)
        matches = MatchResult(1.0, 0.0, pairs)
        score = score_trajectories(swapped, truth, matches)
        # each swapped track splits its votes 10/10; the tie goes to the
        # smaller true id, which ends up with both fragments
        assert score.trajectory_ratio == 0.25
        assert score.trajectory_ratio < 1.0

    def test_short_true_tracks_excluded(self):
        pairs, truth_objects = [], {}
        objs_long = _track(0, range(20), pairs, truth_objects)
        _track(1, range(3), pairs, truth_objects)  # unfindable by contract
        truth = self._truth(truth_objects, 20)
        matches = MatchResult(1.0, 0.0, pairs)
        score = score_trajectories(
            [Trajectory.from_objects(objs_long)], truth, matches, min_track_length=5
        )
        assert score.trajectory_ratio == 1.0


class TestSweep:
    def test_single_cell_single_row(self):
        rows = run_sweep([0.01], [1.0], ["identical"], replicates=1, base_seed=3)
        assert len(rows) == 1
        assert rows[0].replicate_count == 1
        assert rows[0].obj_ratio_std == 0.0

    def test_std_matches_direct_recomputation(self):
        rows = run_sweep([0.01], [1.0], ["identical"], replicates=4, base_seed=3)
        ratios = []
        for rep in range(4):
            cfg = config_for_density(
                0.01, seed=cell_seed(3, 0.01, "identical", rep)
            )
            ratios.append(evaluate_sequence(cfg).object_ratio)
        assert rows[0].obj_ratio_mean == pytest.approx(np.mean(ratios))
        assert rows[0].obj_ratio_std == pytest.approx(np.std(ratios))

    def test_csv_roundtrip(self, tmp_path):
        rows = run_sweep([0.01], [1.0], ["identical"], replicates=1, base_seed=3)
        path = tmp_path / "report.csv"
        write_sweep_csv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0].split(",") == synthbench.SWEEP_COLUMNS
        assert len(lines) == 2

    def test_self_consistency_ceiling(self):
        _, truth = generate_sequence(config_for_density(0.01, seed=8))
        detections = truth_as_detections(truth)
        result = match_objects(detections, truth)
        tracks = []
        by_track = {}
        truth_of = {id(d): t.track_id for d, t in result.pairs}
        for frame_dets in detections:
            for det in frame_dets:
                by_track.setdefault(truth_of[id(det)], []).append(det)
        for objs in by_track.values():
            if len(objs) >= 2:
                tracks.append(Trajectory.from_objects(objs))
        score = score_trajectories(tracks, truth, result, min_track_length=2)
        assert score.trajectory_ratio == 1.0
        assert score.fragmentation == 1.0
