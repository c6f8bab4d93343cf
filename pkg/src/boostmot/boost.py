"""Detection-confidence boosting.

Every operation here only ever raises confidences (clamped to 1), so the set
of detections surviving the confidence threshold can only grow. The combined
boost dispatches on three switches: use a richer averaged similarity instead
of IoU, blend the original confidence with the similarity (soft boost), and
raise detections matching some tracklet above its age-dependent threshold
(varying threshold).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StateError
from .similarity import CHI2_4_P95


@dataclass(frozen=True)
class BoostConfig:
    """Boost hyperparameters and switches.

    Defaults follow the MOT17-style setting (beta_c = 0.65, tau = 0.6); the
    MOT20-style preset uses beta_c = 0.5 with tau = 0.4.
    """

    beta_c: float = 0.65
    alpha: float = 0.65
    q: float = 1.5
    beta_high: float = 0.95
    beta_low: float = 0.8
    gamma: float = 0.0075
    tau: float = 0.6
    use_s: bool = False
    use_sb: bool = False
    use_vt: bool = False
    novelty_gate: float = CHI2_4_P95

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.q < 1.0:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not self.beta_low <= self.beta_high:
            raise ValueError("beta_low must not exceed beta_high")
        for name in ("beta_c", "beta_high", "beta_low", "tau"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")


def _row_max(similarity: np.ndarray) -> np.ndarray:
    # With no tracklets the row maximum is defined as 0 (boost is a no-op).
    if similarity.shape[1] == 0:
        return np.zeros(similarity.shape[0])
    return similarity.max(axis=1)


def dlo_boost(conf: np.ndarray, similarity: np.ndarray, beta_c: float) -> np.ndarray:
    """Plain likely-object boost: c_i -> max(c_i, beta_c * max_j S_ij)."""
    boosted = np.maximum(conf, beta_c * _row_max(similarity))
    return np.minimum(boosted, 1.0)


def soft_boost(conf: np.ndarray, similarity: np.ndarray, alpha: float, q: float) -> np.ndarray:
    """Blend original confidence with the powered row-max similarity."""
    candidate = alpha * conf + (1.0 - alpha) * _row_max(similarity) ** q
    return np.minimum(np.maximum(conf, candidate), 1.0)


def varying_threshold(last_update, cfg: BoostConfig):
    """Per-tracklet similarity threshold, decaying linearly with staleness.

    last_update counts frames since the last successful match; 1 means the
    tracklet was updated on the previous frame.
    """
    last_update = np.asarray(last_update)
    if last_update.size and (last_update < 1).any():
        raise StateError("varying threshold needs last_update >= 1")
    return np.maximum(cfg.beta_low, cfg.beta_high - cfg.gamma * (last_update - 1))


def vt_boost(conf: np.ndarray, similarity: np.ndarray, last_updates: np.ndarray,
             cfg: BoostConfig) -> np.ndarray:
    """Raise to tau any detection whose similarity clears some tracklet's threshold."""
    if similarity.shape[1] == 0:
        return conf.copy()
    beta = varying_threshold(last_updates, cfg)
    hit = (similarity >= beta[None, :]).any(axis=1)
    boosted = np.where(hit, np.maximum(conf, cfg.tau), conf)
    return np.minimum(boosted, 1.0)


def idc_boost(conf: np.ndarray, iou_m: np.ndarray, boost_sim: np.ndarray,
              last_updates: np.ndarray, cfg: BoostConfig) -> np.ndarray:
    """Combined confidence boost.

    With neither soft boost nor varying threshold enabled this is exactly the
    plain likely-object boost over the selected similarity; otherwise soft
    boost runs first and the varying-threshold pass reads its output.
    """
    similarity = boost_sim if cfg.use_s else iou_m
    if not cfg.use_sb and not cfg.use_vt:
        return dlo_boost(conf, similarity, cfg.beta_c)
    out = conf
    if cfg.use_sb:
        out = soft_boost(out, similarity, cfg.alpha, cfg.q)
    if cfg.use_vt:
        out = vt_boost(out, similarity, last_updates, cfg)
    return out


def mahalanobis_novelty_boost(conf: np.ndarray, d2: np.ndarray, cfg: BoostConfig) -> np.ndarray:
    """Raise to tau detections far from every tracklet (likely new objects).

    A detection is an outlier when its smallest squared Mahalanobis distance
    over all tracklets exceeds the gate. No-op with zero tracklets, so first
    frames are governed purely by the creation threshold.
    """
    if d2.shape[1] == 0:
        return conf.copy()
    outlier = d2.min(axis=1) > cfg.novelty_gate
    boosted = np.where(outlier, np.maximum(conf, cfg.tau), conf)
    return np.minimum(boosted, 1.0)
