"""Detection/tracklet similarity measures and their combinations.

Two combined measures are built from the same components:

* association similarity: IoU + lam_iou * c_ij * IoU + lam_mhd * S_mhd
  + lam_shape * S_shape (+ an optional externally supplied appearance term),
  used to build the assignment cost matrix;
* boost similarity: the arithmetic mean of soft buffered IoU, Mahalanobis
  similarity and shape similarity, with the pair confidence forced to 1 in
  the shape term, used when deciding which low-confidence detections to keep.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfidenceError, ContractError, GeometryError, NumericError
from .geometry import BBox

# chi-square(4) quantiles: 0.999 normalizes Mahalanobis similarity,
# 0.95 is the default novelty gate.
CHI2_4_P999 = 18.46682695290317
CHI2_4_P95 = 9.487729036781154

CONF_MODES = ("product", "mean")


@dataclass(frozen=True)
class SimilarityWeights:
    """Non-negative weights of the association similarity terms."""

    lambda_iou: float = 0.5
    lambda_mhd: float = 0.25
    lambda_shape: float = 0.25
    lambda_app: float = 0.0

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < 0:
                raise ValueError(f"similarity weight {name} must be >= 0")


def mahalanobis_d2_matrix(obs: np.ndarray, pred_obs: np.ndarray,
                          innov_covs: np.ndarray) -> np.ndarray:
    """Squared Mahalanobis distances between n observations and m predicted
    observation distributions (mean pred_obs[j], covariance innov_covs[j])."""
    obs = np.asarray(obs, dtype=np.float64)
    pred_obs = np.asarray(pred_obs, dtype=np.float64)
    n, m = obs.shape[0], pred_obs.shape[0]
    if n == 0 or m == 0:
        return np.zeros((n, m))
    try:
        inv = np.linalg.inv(innov_covs)
    except np.linalg.LinAlgError as exc:
        raise NumericError("singular innovation covariance") from exc
    diff = obs[:, None, :] - pred_obs[None, :, :]  # (n, m, 4)
    d2 = np.einsum("nmi,mij,nmj->nm", diff, inv, diff)
    if not np.isfinite(d2).all():
        raise NumericError("non-finite Mahalanobis distances")
    return d2


def mahalanobis_similarity(d2, gate: float = CHI2_4_P999):
    """Linear map of squared distance to [0, 1]: 1 at zero, 0 at/beyond the gate."""
    return np.maximum(0.0, 1.0 - np.asarray(d2, dtype=np.float64) / gate)


def shape_mismatch(d: BBox, t: BBox) -> float:
    """Relative width/height mismatch: (|dw-tw| + |dh-th|) / max(dw, tw)."""
    if not (d.w > 0 and d.h > 0 and t.w > 0 and t.h > 0):
        raise GeometryError("shape mismatch requires positive box dimensions")
    return (abs(d.w - t.w) + abs(d.h - t.h)) / max(d.w, t.w)


def shape_mismatch_matrix(det_wh: np.ndarray, trk_wh: np.ndarray) -> np.ndarray:
    det_wh = np.asarray(det_wh, dtype=np.float64)
    trk_wh = np.asarray(trk_wh, dtype=np.float64)
    if det_wh.size and (det_wh <= 0).any() or trk_wh.size and (trk_wh <= 0).any():
        raise GeometryError("shape mismatch requires positive box dimensions")
    dw, dh = det_wh[:, 0][:, None], det_wh[:, 1][:, None]
    tw, th = trk_wh[:, 0][None, :], trk_wh[:, 1][None, :]
    return (np.abs(dw - tw) + np.abs(dh - th)) / np.maximum(dw, tw)


def pair_confidence(c_d: float, c_t: float, mode: str = "product") -> float:
    """Detection-tracklet confidence, composed as a product (default) or mean."""
    if not (0.0 <= c_d <= 1.0 and 0.0 <= c_t <= 1.0):
        raise ConfidenceError(f"confidences must lie in [0, 1], got {c_d}, {c_t}")
    if mode == "product":
        return c_d * c_t
    if mode == "mean":
        return (c_d + c_t) / 2.0
    raise ValueError(f"unknown confidence mode {mode!r}")


def pair_confidence_matrix(det_conf: np.ndarray, trk_conf: np.ndarray,
                           mode: str = "product") -> np.ndarray:
    det_conf = np.asarray(det_conf, dtype=np.float64)
    trk_conf = np.asarray(trk_conf, dtype=np.float64)
    for arr, who in ((det_conf, "detection"), (trk_conf, "tracklet")):
        if arr.size and ((arr < 0).any() or (arr > 1).any()):
            raise ConfidenceError(f"{who} confidences must lie in [0, 1]")
    if mode == "product":
        return det_conf[:, None] * trk_conf[None, :]
    if mode == "mean":
        return (det_conf[:, None] + trk_conf[None, :]) / 2.0
    raise ValueError(f"unknown confidence mode {mode!r}")


def shape_similarity(d: BBox, t: BBox, c_ij: float) -> float:
    """c_ij * exp(-shape mismatch); the boost path passes c_ij = 1."""
    if not (0.0 <= c_ij <= 1.0):
        raise ConfidenceError(f"pair confidence must lie in [0, 1], got {c_ij}")
    return c_ij * math.exp(-shape_mismatch(d, t))


def shape_similarity_matrix(det_wh: np.ndarray, trk_wh: np.ndarray,
                            pair_conf: np.ndarray | float = 1.0) -> np.ndarray:
    return pair_conf * np.exp(-shape_mismatch_matrix(det_wh, trk_wh))


def _check_dims(n: int, m: int, *matrices: np.ndarray) -> None:
    for mat in matrices:
        if mat.shape != (n, m):
            raise ContractError(f"component matrix has shape {mat.shape}, expected {(n, m)}")


def association_similarity(iou_m: np.ndarray, pair_conf: np.ndarray,
                           mhd_sim: np.ndarray, shape_sim: np.ndarray,
                           weights: SimilarityWeights,
                           external: np.ndarray | None = None) -> np.ndarray:
    """Weighted sum of component measures used for the assignment cost."""
    n, m = iou_m.shape
    _check_dims(n, m, pair_conf, mhd_sim, shape_sim)
    out = (iou_m + weights.lambda_iou * pair_conf * iou_m
           + weights.lambda_mhd * mhd_sim + weights.lambda_shape * shape_sim)
    if external is not None:
        _check_dims(n, m, external)
        out = out + weights.lambda_app * external
    return out


def boost_similarity(sbiou_m: np.ndarray, mhd_sim: np.ndarray,
                     shape_sim_full_conf: np.ndarray) -> np.ndarray:
    """Mean of the three measures; all must agree for a high score."""
    n, m = sbiou_m.shape
    _check_dims(n, m, mhd_sim, shape_sim_full_conf)
    return (sbiou_m + mhd_sim + shape_sim_full_conf) / 3.0
