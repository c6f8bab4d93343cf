import itertools

import numpy as np
import pytest

from boostmot.boost import (BoostConfig, dlo_boost, idc_boost,
                            mahalanobis_novelty_boost, soft_boost,
                            varying_threshold, vt_boost)
from boostmot.errors import StateError


class TestDloBoost:
    def test_worked_example(self):
        out = dlo_boost(np.array([0.3]), np.array([[0.9]]), 0.65)
        assert out[0] == pytest.approx(0.585)

    def test_zero_row_max_unchanged(self):
        out = dlo_boost(np.array([0.3, 0.7]), np.zeros((2, 3)), 0.65)
        assert out.tolist() == [0.3, 0.7]

    def test_implied_iou_threshold(self):
        # mot17 values: IoU just above tau / beta_c = 0.923 clears tau.
        cfg = BoostConfig()
        needed = cfg.tau / cfg.beta_c
        assert needed == pytest.approx(0.923076923076923)
        above = dlo_boost(np.array([0.0]), np.array([[needed + 1e-6]]), cfg.beta_c)
        below = dlo_boost(np.array([0.0]), np.array([[needed - 1e-3]]), cfg.beta_c)
        assert above[0] > cfg.tau > below[0]

    def test_no_tracklets_noop(self):
        out = dlo_boost(np.array([0.2]), np.zeros((1, 0)), 0.65)
        assert out.tolist() == [0.2]


class TestSoftBoost:
    def test_worked_example_fig4(self):
        # c = 0.56 just below tau = 0.6; similarity 0.82 lifts it over.
        out = soft_boost(np.array([0.56]), np.array([[0.82]]), 0.65, 1.5)
        assert out[0] == pytest.approx(0.6238895534645439, abs=1e-3)
        assert out[0] > 0.6

    def test_alpha_one_is_identity(self, rng):
        conf = rng.uniform(0, 1, size=10)
        sim = rng.uniform(0, 1, size=(10, 4))
        assert np.array_equal(soft_boost(conf, sim, 1.0, 1.5), conf)

    def test_zero_confidence_gets_similarity_share(self):
        out = soft_boost(np.array([0.0]), np.array([[1.0]]), 0.65, 1.5)
        assert out[0] == pytest.approx(0.35)

    def test_larger_q_never_boosts_more(self, rng):
        conf = rng.uniform(0, 1, size=50)
        sim = rng.uniform(0, 1, size=(50, 6))
        hi = soft_boost(conf, sim, 0.65, 2.0)
        lo = soft_boost(conf, sim, 0.65, 1.2)
        assert (hi <= lo + 1e-12).all()


class TestVaryingThreshold:
    def test_paper_endpoints(self):
        cfg = BoostConfig()
        assert varying_threshold(1, cfg) == pytest.approx(0.95)
        assert varying_threshold(21, cfg) == pytest.approx(0.80)
        assert varying_threshold(27, cfg) == pytest.approx(0.80)

    def test_monotone_and_clamped(self):
        cfg = BoostConfig()
        values = varying_threshold(np.arange(1, 100), cfg)
        assert (np.diff(values) <= 0).all()
        assert (values >= cfg.beta_low).all()
        assert (values <= cfg.beta_high).all()

    def test_invalid_last_update(self):
        with pytest.raises(StateError):
            varying_threshold(0, BoostConfig())


class TestVtBoost:
    def test_fig5_scenario(self):
        # Stale tracklet (27 frames): threshold 0.8, IoU 0.83 >= 0.8 lifts
        # the 0.35-confidence detection to tau.
        cfg = BoostConfig()
        out = vt_boost(np.array([0.35]), np.array([[0.83]]), np.array([27]), cfg)
        assert out[0] == pytest.approx(cfg.tau)

    def test_below_threshold_unchanged(self):
        cfg = BoostConfig()
        out = vt_boost(np.array([0.35]), np.array([[0.79]]), np.array([27]), cfg)
        assert out[0] == 0.35

    def test_high_confidence_kept(self):
        cfg = BoostConfig()
        out = vt_boost(np.array([0.9]), np.array([[0.99]]), np.array([1]), cfg)
        assert out[0] == 0.9


class TestIdcBoost:
    def test_flags_off_bit_identical_to_dlo(self, rng):
        cfg = BoostConfig()
        for _ in range(50):
            n, m = int(rng.integers(1, 8)), int(rng.integers(0, 8))
            conf = rng.uniform(0, 1, size=n)
            iou_m = rng.uniform(0, 1, size=(n, m))
            boost_sim = rng.uniform(0, 1, size=(n, m))
            last = rng.integers(1, 40, size=m)
            got = idc_boost(conf, iou_m, boost_sim, last, cfg)
            want = dlo_boost(conf, iou_m, cfg.beta_c)
            assert np.array_equal(got, want)

    def test_use_s_routes_averaged_similarity(self, rng):
        cfg = BoostConfig(use_s=True)
        conf = rng.uniform(0, 1, size=5)
        iou_m = rng.uniform(0, 1, size=(5, 3))
        boost_sim = rng.uniform(0, 1, size=(5, 3))
        got = idc_boost(conf, iou_m, boost_sim, np.ones(3, dtype=int), cfg)
        assert np.array_equal(got, dlo_boost(conf, boost_sim, cfg.beta_c))

    def test_all_flags_hand_trace(self):
        cfg = BoostConfig(use_s=True, use_sb=True, use_vt=True)
        conf = np.array([0.2, 0.5])
        iou_m = np.array([[0.5, 0.1], [0.1, 0.6]])
        boost_sim = np.array([[0.96, 0.3], [0.2, 0.85]])
        last = np.array([1, 25])
        # Soft boost first (row maxes 0.96 and 0.85), then the varying
        # threshold pass: beta = [0.95, 0.8], both rows have a hit.
        after_sb = soft_boost(conf, boost_sim, cfg.alpha, cfg.q)
        expected = vt_boost(after_sb, boost_sim, last, cfg)
        got = idc_boost(conf, iou_m, boost_sim, last, cfg)
        assert np.array_equal(got, expected)
        assert (got >= conf).all()
        assert got[0] >= cfg.tau and got[1] >= cfg.tau

    def test_monotone_all_flag_combinations(self, rng):
        for use_s, use_sb, use_vt in itertools.product([False, True], repeat=3):
            cfg = BoostConfig(use_s=use_s, use_sb=use_sb, use_vt=use_vt)
            for _ in range(100):
                n, m = int(rng.integers(1, 6)), int(rng.integers(0, 6))
                conf = rng.uniform(0, 1, size=n)
                iou_m = rng.uniform(0, 1, size=(n, m))
                boost_sim = rng.uniform(0, 1, size=(n, m))
                last = rng.integers(1, 60, size=m)
                out = idc_boost(conf, iou_m, boost_sim, last, cfg)
                assert (out >= conf).all()
                assert (out <= 1.0).all()

    def test_kept_set_only_grows(self, rng):
        cfg = BoostConfig(use_s=True, use_sb=True, use_vt=True)
        for _ in range(200):
            conf = rng.uniform(0, 1, size=8)
            sim = rng.uniform(0, 1, size=(8, 5))
            out = idc_boost(conf, sim, sim, rng.integers(1, 40, size=5), cfg)
            before = conf >= cfg.tau
            after = out >= cfg.tau
            assert (after | ~before).all()  # before implies after


class TestNoveltyBoost:
    def test_coincident_detection_unchanged(self):
        cfg = BoostConfig()
        out = mahalanobis_novelty_boost(np.array([0.3]), np.array([[0.0]]), cfg)
        assert out[0] == 0.3

    def test_outlier_raised_to_tau(self):
        cfg = BoostConfig()
        d2 = np.array([[cfg.novelty_gate + 1.0, cfg.novelty_gate + 5.0]])
        out = mahalanobis_novelty_boost(np.array([0.3]), d2, cfg)
        assert out[0] == pytest.approx(cfg.tau)

    def test_near_any_tracklet_unchanged(self):
        cfg = BoostConfig()
        d2 = np.array([[cfg.novelty_gate + 1.0, 2.0]])
        out = mahalanobis_novelty_boost(np.array([0.3]), d2, cfg)
        assert out[0] == 0.3

    def test_empty_tracklets_noop(self):
        cfg = BoostConfig()
        out = mahalanobis_novelty_boost(np.array([0.3]), np.zeros((1, 0)), cfg)
        assert out[0] == 0.3


class TestBoostConfig:
    def test_invalid_ranges_rejected(self):
        with pytest.raises(ValueError):
            BoostConfig(alpha=1.5)
        with pytest.raises(ValueError):
            BoostConfig(q=0.5)
        with pytest.raises(ValueError):
            BoostConfig(beta_low=0.9, beta_high=0.8)
        with pytest.raises(ValueError):
            BoostConfig(gamma=-1.0)
        with pytest.raises(ValueError):
            BoostConfig(tau=1.2)
