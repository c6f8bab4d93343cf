"""Per-frame tracking pipeline.

Each step runs: predict -> confidence boost -> threshold -> association
similarity -> one-stage assignment -> lifecycle bookkeeping. The pipeline is
fully deterministic: identical detections and configuration give identical
output.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import boost as boost_ops
from .association import associate
from .dataio import Detection, MotRow, RunConfig, materialize_external
from .errors import StateError
from .geometry import BBox, iou_batch, soft_biou_batch
from .motion import (KalmanState, bbox_to_observation, init_state,
                     innovation_covariance, predict, state_to_bbox, update)
from .similarity import (association_similarity, boost_similarity,
                         mahalanobis_d2_matrix, mahalanobis_similarity,
                         pair_confidence_matrix, shape_similarity_matrix)


def tracklet_confidence(last_update: int, horizon: int) -> float:
    """Prediction reliability: 1 right after an update, decaying linearly to 0."""
    return min(max(1.0 - last_update / horizon, 0.0), 1.0)


@dataclass
class Tracklet:
    """One tracked object: identity, motion state, and lifecycle counters."""

    id: int
    state: KalmanState
    last_update: int = 0
    hits: int = 1
    confirmed: bool = True

    @property
    def status(self) -> str:
        return "confirmed" if self.confirmed else "tentative"


@dataclass(frozen=True)
class TrackRecord:
    """One emitted (id, box, score) row."""

    track_id: int
    box: BBox
    score: float


@dataclass
class FrameResult:
    frame: int
    records: list[TrackRecord] = field(default_factory=list)


class Tracker:
    """Stateful per-sequence tracker; call step() with increasing frame indices."""

    def __init__(self, cfg: RunConfig,
                 external_similarity: dict[int, list[tuple[int, int, float]]] | None = None):
        self.cfg = cfg
        self.noise = cfg.noise()
        self.boost_cfg = cfg.boost_config()
        self.weights = cfg.weights()
        self.external = external_similarity or {}
        self.tracklets: list[Tracklet] = []
        self.next_id = 1
        self.last_frame = 0
        # (last_update at match time, IoU of detection vs predicted box),
        # consumed by the prediction-quality decay study.
        self.match_iou_log: list[tuple[int, float]] = []

    def _new_tracklet(self, det: Detection) -> Tracklet:
        trk = Tracklet(id=self.next_id, state=init_state(det.box, self.noise),
                       hits=1, confirmed=self.cfg.min_hits <= 1)
        self.next_id += 1
        self.tracklets.append(trk)
        return trk

    def step(self, frame: int, detections: list[Detection]) -> FrameResult:
        if frame <= self.last_frame:
            raise StateError(f"frames must be strictly increasing, got {frame} after {self.last_frame}")
        for det in detections:
            if det.frame != frame:
                raise StateError(f"detection frame {det.frame} does not match step frame {frame}")
        self.last_frame = frame

        for trk in self.tracklets:
            trk.state = predict(trk.state, self.noise)
            trk.last_update += 1

        n = len(detections)
        m = len(self.tracklets)
        conf = np.array([d.conf for d in detections], dtype=np.float64)
        det_boxes = np.array([[d.box.x, d.box.y, d.box.w, d.box.h] for d in detections],
                             dtype=np.float64).reshape(n, 4)

        result = FrameResult(frame)
        if m > 0 and n > 0:
            trk_boxes = np.array([state_to_bbox(t.state).to_array() for t in self.tracklets])
            trk_conf = np.array([tracklet_confidence(t.last_update, self.cfg.horizon)
                                 for t in self.tracklets])
            last_updates = np.array([t.last_update for t in self.tracklets])
            det_obs = np.array([bbox_to_observation(d.box) for d in detections])
            pred_obs = np.array([t.state.mean[:4] for t in self.tracklets])
            innov = np.array([innovation_covariance(t.state, self.noise) for t in self.tracklets])

            d2 = mahalanobis_d2_matrix(det_obs, pred_obs, innov)
            iou_m = iou_batch(det_boxes, trk_boxes)

            if self.cfg.use_novelty_boost:
                conf = boost_ops.mahalanobis_novelty_boost(conf, d2, self.boost_cfg)
            if self.cfg.use_dlo_boost:
                if self.cfg.use_s:
                    boost_sim = boost_similarity(
                        soft_biou_batch(det_boxes, trk_boxes, trk_conf),
                        mahalanobis_similarity(d2),
                        shape_similarity_matrix(det_boxes[:, 2:], trk_boxes[:, 2:], 1.0))
                else:
                    boost_sim = iou_m
                conf = boost_ops.idc_boost(conf, iou_m, boost_sim, last_updates, self.boost_cfg)

            keep = conf >= self.cfg.tau
            kept_idx = np.flatnonzero(keep)
            kept_conf = conf[keep]
            kept_boxes = det_boxes[keep]
            kept_iou = iou_m[keep]

            pair_conf = pair_confidence_matrix(kept_conf, trk_conf, self.cfg.conf_mode)
            sim = association_similarity(
                kept_iou, pair_conf, mahalanobis_similarity(d2[keep]),
                shape_similarity_matrix(kept_boxes[:, 2:], trk_boxes[:, 2:], pair_conf),
                self.weights,
                external=self._external_matrix(frame, n, m, keep))

            assignment = associate(sim, self.cfg.tau_s)

            for di, tj in assignment.matches:
                trk = self.tracklets[tj]
                self.match_iou_log.append((int(last_updates[tj]), float(kept_iou[di, tj])))
                det = detections[int(kept_idx[di])]
                trk.state = update(trk.state, det.box, self.noise)
                trk.last_update = 0
                trk.hits += 1
                if trk.hits >= self.cfg.min_hits:
                    trk.confirmed = True
                if trk.confirmed:
                    result.records.append(TrackRecord(trk.id, state_to_bbox(trk.state),
                                                      float(kept_conf[di])))

            for di in assignment.unmatched_detections:
                if kept_conf[di] > self.cfg.creation_threshold:
                    det = detections[int(kept_idx[di])]
                    trk = self._new_tracklet(det)
                    if trk.confirmed:
                        result.records.append(TrackRecord(trk.id, state_to_bbox(trk.state),
                                                          float(kept_conf[di])))
        elif n > 0:
            # No tracklets: boosts are no-ops, every kept detection is unmatched.
            for i in range(n):
                if conf[i] >= self.cfg.tau and conf[i] > self.cfg.creation_threshold:
                    trk = self._new_tracklet(detections[i])
                    if trk.confirmed:
                        result.records.append(TrackRecord(trk.id, state_to_bbox(trk.state),
                                                          float(conf[i])))

        self.tracklets = [t for t in self.tracklets if t.last_update <= self.cfg.max_age]
        return result

    def _external_matrix(self, frame: int, n: int, m: int, keep: np.ndarray) -> np.ndarray | None:
        entries = self.external.get(frame)
        if entries is None:
            return None
        return materialize_external(entries, n, m)[keep]


def run_sequence(stream: dict[int, list[Detection]], cfg: RunConfig,
                 external_similarity: dict[int, list[tuple[int, int, float]]] | None = None,
                 tracker: Tracker | None = None) -> list[FrameResult]:
    """Fold the per-frame step over a detection stream.

    Iterates the full frame range (missing frames count as empty) so tracklet
    aging matches wall-clock frames.
    """
    if not stream:
        return []
    tracker = tracker or Tracker(cfg, external_similarity)
    first, last = min(stream), max(stream)
    results = []
    for frame in range(first, last + 1):
        results.append(tracker.step(frame, stream.get(frame, [])))
    if cfg.interpolate_gap > 0:
        results = interpolate_gaps(results, cfg.interpolate_gap)
    return results


def interpolate_gaps(results: list[FrameResult], max_gap: int) -> list[FrameResult]:
    """Fill per-id emission gaps of up to max_gap frames by linear interpolation.

    A transparent post-process (not part of the online pipeline); disabled by
    default.
    """
    by_frame: dict[int, list[TrackRecord]] = {r.frame: list(r.records) for r in results}
    seen: dict[int, tuple[int, TrackRecord]] = {}
    for res in sorted(results, key=lambda r: r.frame):
        for rec in res.records:
            if rec.track_id in seen:
                prev_frame, prev_rec = seen[rec.track_id]
                gap = res.frame - prev_frame - 1
                if 0 < gap <= max_gap:
                    for k in range(1, gap + 1):
                        t = k / (gap + 1)
                        box = BBox(
                            prev_rec.box.x + t * (rec.box.x - prev_rec.box.x),
                            prev_rec.box.y + t * (rec.box.y - prev_rec.box.y),
                            prev_rec.box.w + t * (rec.box.w - prev_rec.box.w),
                            prev_rec.box.h + t * (rec.box.h - prev_rec.box.h))
                        score = prev_rec.score + t * (rec.score - prev_rec.score)
                        by_frame.setdefault(prev_frame + k, []).append(
                            TrackRecord(rec.track_id, box, score))
            seen[rec.track_id] = (res.frame, rec)
    return [FrameResult(f, by_frame[f]) for f in sorted(by_frame)]


def results_to_rows(results: list[FrameResult]) -> list[MotRow]:
    rows = []
    for res in results:
        for rec in res.records:
            rows.append(MotRow(res.frame, rec.track_id, rec.box.x, rec.box.y,
                               rec.box.w, rec.box.h, rec.score))
    return rows
