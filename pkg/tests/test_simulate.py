import numpy as np
import pytest

from boostmot.dataio import RunConfig
from boostmot.errors import ConfigError
from boostmot.geometry import iou
from boostmot.simulate import (SceneConfig, detections_from_rows, generate,
                               gt_tracks_from_rows, iou_decay_study)


class TestGenerate:
    def test_zero_noise_detections_equal_gt(self):
        scene = SceneConfig(n_objects=3, n_frames=40, det_noise_std=0.0,
                            conf_jitter=0.0, n_occlusions=0, n_ghosts=0, seed=1)
        gt_rows, det_rows = generate(scene)
        assert len(gt_rows) == len(det_rows) == 3 * 40
        for g, d in zip(gt_rows, det_rows):
            assert (g.x, g.y, g.w, g.h) == (d.x, d.y, d.w, d.h)
            assert d.conf == scene.base_conf

    def test_occlusion_frames_dip_confidence(self):
        scene = SceneConfig(n_objects=4, n_frames=120, n_occlusions=6,
                            occ_len_min=5, occ_len_max=10, n_ghosts=0, seed=2)
        gt_rows, det_rows = generate(scene)
        dips = {(r.frame, r.track_id) for r in gt_rows if r.vis == 0.5}
        assert dips, "scene should contain occluded frames"
        det_conf = {}
        per_frame = {}
        for r in det_rows:
            per_frame.setdefault(r.frame, []).append(r)
        for (frame, tid) in dips:
            conf = per_frame[frame][tid - 1].conf
            assert scene.dip_conf_min <= conf <= scene.dip_conf_max

    def test_occluded_detections_remain_true_positives(self):
        scene = SceneConfig(n_objects=4, n_frames=150, n_occlusions=8, n_ghosts=0, seed=3)
        gt_rows, det_rows = generate(scene)
        gt_map = {(r.frame, r.track_id): r.box for r in gt_rows}
        per_frame = {}
        for r in det_rows:
            per_frame.setdefault(r.frame, []).append(r)
        for r in gt_rows:
            if r.vis == 0.5:
                d = per_frame[r.frame][r.track_id - 1]
                assert iou(gt_map[(r.frame, r.track_id)], d.box) > 0.5

    def test_same_seed_identical_output(self):
        scene = SceneConfig(n_objects=5, n_frames=60, n_occlusions=4, n_ghosts=3, seed=11)
        a = generate(scene)
        b = generate(scene)
        assert a == b

    def test_different_seed_differs(self):
        a = generate(SceneConfig(n_objects=3, n_frames=30, seed=1))
        b = generate(SceneConfig(n_objects=3, n_frames=30, seed=2))
        assert a != b

    def test_gt_ids_present_every_frame(self):
        scene = SceneConfig(n_objects=6, n_frames=50, seed=4)
        gt_rows, _ = generate(scene)
        frames = gt_tracks_from_rows(gt_rows)
        for f in range(1, 51):
            assert sorted(tid for tid, _ in frames[f]) == list(range(1, 7))

    def test_boxes_stay_in_field(self):
        scene = SceneConfig(n_objects=8, n_frames=300, speed_min=3, speed_max=6, seed=6)
        gt_rows, _ = generate(scene)
        for r in gt_rows:
            assert -1e-6 <= r.x and r.x + r.w <= scene.width + 1e-6
            assert -1e-6 <= r.y and r.y + r.h <= scene.height + 1e-6

    def test_ghosts_are_static_extra_detections(self):
        scene = SceneConfig(n_objects=3, n_frames=40, n_ghosts=2,
                            ghost_jitter_std=0.0, seed=7)
        _, det_rows = generate(scene)
        per_frame = {}
        for r in det_rows:
            per_frame.setdefault(r.frame, []).append(r)
        assert all(len(v) == 5 for v in per_frame.values())
        first = [(r.x, r.y, r.w, r.h) for r in per_frame[1][3:]]
        last = [(r.x, r.y, r.w, r.h) for r in per_frame[40][3:]]
        assert first == last

    def test_ghost_confidence_range(self):
        scene = SceneConfig(n_objects=2, n_frames=30, n_ghosts=2,
                            ghost_conf_min=0.5, ghost_conf_max=0.7, seed=8)
        _, det_rows = generate(scene)
        per_frame = {}
        for r in det_rows:
            per_frame.setdefault(r.frame, []).append(r)
        for rows in per_frame.values():
            for r in rows[2:]:
                assert 0.5 <= r.conf <= 0.7

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError):
            SceneConfig(width=-5)
        with pytest.raises(ConfigError):
            SceneConfig(dip_conf_min=0.5, dip_conf_max=0.3)
        with pytest.raises(ConfigError):
            SceneConfig(n_objects=-1)


class TestDecayStudy:
    STUDY_SCENE = dict(n_objects=10, n_frames=400, speed_min=2.0, speed_max=5.0,
                       det_noise_std=1.5, n_occlusions=25, occ_len_min=10,
                       occ_len_max=25, occlusion_noise_scale=1.5, n_ghosts=0, seed=3)
    STUDY_CFG = RunConfig(use_dlo_boost=False, use_novelty_boost=False)

    def test_low_noise_first_bucket_near_one(self):
        scene = SceneConfig(n_objects=5, n_frames=80, det_noise_std=0.1,
                            n_occlusions=0, n_ghosts=0, seed=5)
        stats = iou_decay_study(scene, RunConfig())
        assert stats[1].mean_iou > 0.95

    def test_quality_decays_with_staleness(self):
        stats = iou_decay_study(SceneConfig(**self.STUDY_SCENE), self.STUDY_CFG)
        assert 1 in stats and stats[1].count > 100
        late = [b for b in stats if b >= 15]
        assert late, "expected rematches after long occlusions"
        for bucket in late:
            assert stats[bucket].q90_iou < stats[1].q90_iou

    def test_deterministic(self):
        a = iou_decay_study(SceneConfig(**self.STUDY_SCENE), self.STUDY_CFG)
        b = iou_decay_study(SceneConfig(**self.STUDY_SCENE), self.STUDY_CFG)
        assert a == b

    def test_empty_buckets_absent(self):
        scene = SceneConfig(n_objects=3, n_frames=40, det_noise_std=0.0,
                            conf_jitter=0.0, n_occlusions=0, n_ghosts=0, seed=1)
        stats = iou_decay_study(scene, RunConfig())
        assert set(stats) == {1}
