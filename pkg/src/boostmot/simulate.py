"""Seeded synthetic scenes: constant-velocity objects with reflective walls,
noisy confidence-scored detections, occlusion confidence dips, and static
ghost false positives.

Occlusions keep emitting detections (low confidence true positives rather
than dropped boxes), since that is what confidence boosting targets. Ghosts
repeat a static box with tight jitter; placed on an object's future path they
reproduce the way detectors hallucinate near real objects.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import Detection, MotRow, RunConfig, coerce_mapping, read_kv_file
from .errors import ConfigError
from .geometry import BBox
from .tracker import Tracker


@dataclass(frozen=True)
class SceneConfig:
    """Synthetic scene parameters; fully determined by the seed."""

    width: float = 800.0
    height: float = 600.0
    n_objects: int = 10
    n_frames: int = 300
    speed_min: float = 1.0
    speed_max: float = 4.0
    box_w_min: float = 24.0
    box_w_max: float = 40.0
    box_h_min: float = 48.0
    box_h_max: float = 80.0
    det_noise_std: float = 1.0
    base_conf: float = 0.9
    conf_jitter: float = 0.02
    dip_conf_min: float = 0.25
    dip_conf_max: float = 0.35
    n_occlusions: int = 8
    occ_len_min: int = 5
    occ_len_max: int = 20
    occlusion_noise_scale: float = 1.5
    n_ghosts: int = 0
    ghost_conf_min: float = 0.5
    ghost_conf_max: float = 0.7
    ghost_jitter_std: float = 0.5
    ghost_size_scale: float = 1.2
    ghost_on_path: bool = True
    seed: int = 0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ConfigError("field size must be positive")
        for name in ("n_objects", "n_frames", "n_occlusions", "n_ghosts"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        for lo, hi in (("speed_min", "speed_max"), ("box_w_min", "box_w_max"),
                       ("box_h_min", "box_h_max"), ("dip_conf_min", "dip_conf_max"),
                       ("occ_len_min", "occ_len_max"), ("ghost_conf_min", "ghost_conf_max")):
            if getattr(self, lo) > getattr(self, hi):
                raise ConfigError(f"{lo} must not exceed {hi}")
        for name in ("base_conf", "dip_conf_min", "dip_conf_max",
                     "ghost_conf_min", "ghost_conf_max"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")


def read_scene_config(path) -> SceneConfig:
    return SceneConfig(**coerce_mapping(SceneConfig, read_kv_file(path)))


def _reflect(pos: float, vel: float, lo: float, hi: float) -> tuple[float, float]:
    pos += vel
    if pos < lo:
        pos = 2 * lo - pos
        vel = -vel
    elif pos > hi:
        pos = 2 * hi - pos
        vel = -vel
    return pos, vel


def generate(cfg: SceneConfig) -> tuple[list[MotRow], list[MotRow]]:
    """Build (ground-truth rows, detection rows), deterministic per seed."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_objects

    widths = rng.uniform(cfg.box_w_min, cfg.box_w_max, size=n)
    heights = rng.uniform(cfg.box_h_min, cfg.box_h_max, size=n)
    cx = rng.uniform(widths / 2, cfg.width - widths / 2)
    cy = rng.uniform(heights / 2, cfg.height - heights / 2)
    speed = rng.uniform(cfg.speed_min, cfg.speed_max, size=n)
    angle = rng.uniform(0.0, 2 * np.pi, size=n)
    vx = speed * np.cos(angle)
    vy = speed * np.sin(angle)

    occluded = np.zeros((cfg.n_frames + 1, n), dtype=bool)
    for _ in range(cfg.n_occlusions):
        if n == 0 or cfg.n_frames < 2:
            break
        obj = int(rng.integers(0, n))
        length = int(rng.integers(cfg.occ_len_min, cfg.occ_len_max + 1))
        start = int(rng.integers(1, max(2, cfg.n_frames - length + 1)))
        occluded[start:start + length, obj] = True

    # Object centers per frame, with wall reflections.
    centers = np.zeros((cfg.n_frames + 1, n, 2))
    for frame in range(1, cfg.n_frames + 1):
        for i in range(n):
            cx[i], vx[i] = _reflect(cx[i], vx[i], widths[i] / 2, cfg.width - widths[i] / 2)
            cy[i], vy[i] = _reflect(cy[i], vy[i], heights[i] / 2, cfg.height - heights[i] / 2)
            centers[frame, i] = (cx[i], cy[i])

    ghosts = []
    if cfg.n_ghosts > 0 and n > 0:
        # Static false positives pinned to points objects pass through.
        for k in range(cfg.n_ghosts):
            obj = k % n
            frame = (k + 1) * cfg.n_frames // (cfg.n_ghosts + 1)
            frame = max(1, min(cfg.n_frames, frame))
            gw = widths[obj]
            gh = heights[obj] * cfg.ghost_size_scale
            if cfg.ghost_on_path:
                gcx, gcy = centers[frame, obj]
            else:
                gcx = rng.uniform(gw / 2, cfg.width - gw / 2)
                gcy = rng.uniform(gh / 2, cfg.height - gh / 2)
            ghosts.append((gcx, gcy, gw, gh))

    gt_rows: list[MotRow] = []
    det_rows: list[MotRow] = []
    for frame in range(1, cfg.n_frames + 1):
        for i in range(n):
            ccx, ccy = centers[frame, i]
            x, y = ccx - widths[i] / 2, ccy - heights[i] / 2
            dip = bool(occluded[frame, i])
            gt_rows.append(MotRow(frame, i + 1, x, y, widths[i], heights[i],
                                  1.0, cls=1, vis=0.5 if dip else 1.0))

            noise_std = cfg.det_noise_std * (cfg.occlusion_noise_scale if dip else 1.0)
            dx, dy, dw, dh = rng.normal(0.0, noise_std, size=4) if noise_std > 0 else (0, 0, 0, 0)
            w = max(widths[i] + dw, 1.0)
            h = max(heights[i] + dh, 1.0)
            if dip:
                conf = rng.uniform(cfg.dip_conf_min, cfg.dip_conf_max)
            else:
                conf = float(np.clip(cfg.base_conf + rng.normal(0.0, cfg.conf_jitter), 0.0, 1.0))
            det_rows.append(MotRow(frame, -1, x + dx, y + dy, w, h, conf))

        for gcx, gcy, gw, gh in ghosts:
            jx, jy = (rng.normal(0.0, cfg.ghost_jitter_std, size=2)
                      if cfg.ghost_jitter_std > 0 else (0.0, 0.0))
            conf = rng.uniform(cfg.ghost_conf_min, cfg.ghost_conf_max)
            det_rows.append(MotRow(frame, -1, gcx - gw / 2 + jx, gcy - gh / 2 + jy,
                                   gw, gh, conf))
    return gt_rows, det_rows


def detections_from_rows(rows: list[MotRow]) -> dict[int, list[Detection]]:
    frames: dict[int, list[Detection]] = {}
    for row in rows:
        frames.setdefault(row.frame, []).append(Detection(row.frame, row.box, row.conf))
    return frames


def gt_tracks_from_rows(rows: list[MotRow]) -> dict[int, list[tuple[int, BBox]]]:
    frames: dict[int, list[tuple[int, BBox]]] = {}
    for row in rows:
        frames.setdefault(row.frame, []).append((row.track_id, row.box))
    return frames


@dataclass(frozen=True)
class BucketStat:
    count: int
    mean_iou: float
    q90_iou: float


def iou_decay_study(scene: SceneConfig, run_cfg: RunConfig) -> dict[int, BucketStat]:
    """Match-quality decay: IoU of accepted matches bucketed by how many
    frames passed since the matched tracklet's previous update.

    Buckets with no matches are absent from the result.
    """
    _, det_rows = generate(scene)
    stream = detections_from_rows(det_rows)
    tracker = Tracker(run_cfg)
    for frame in range(1, scene.n_frames + 1):
        tracker.step(frame, stream.get(frame, []))

    buckets: dict[int, list[float]] = {}
    for last_update, iou_val in tracker.match_iou_log:
        buckets.setdefault(last_update, []).append(iou_val)
    return {
        k: BucketStat(len(v), float(np.mean(v)), float(np.quantile(v, 0.9)))
        for k, v in sorted(buckets.items())
    }
