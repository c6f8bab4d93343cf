"""MOT Challenge file I/O and run configuration.

File formats are the comma-separated MOT conventions: detection and result
rows are ``frame,id,x,y,w,h,conf,-1,-1,-1`` and ground-truth rows are
``frame,id,x,y,w,h,flag,class,visibility``. Output formatting is fixed
(2 decimals for boxes, 4 for confidences) so regression diffs are byte-stable.

The run configuration is a flat ``key = value`` text file with two named
dataset presets; unknown keys and out-of-range values are rejected outright
so ablation configs cannot silently drift.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .boost import BoostConfig
from .errors import ConfigError, ContractError, ParseError
from .geometry import BBox
from .motion import NoiseConfig
from .similarity import CHI2_4_P95, CONF_MODES, SimilarityWeights


@dataclass(frozen=True)
class Detection:
    """One detected box on one frame with its confidence score."""

    frame: int
    box: BBox
    conf: float


@dataclass(frozen=True)
class MotRow:
    """One row of a MOT det/gt/result file."""

    frame: int
    track_id: int
    x: float
    y: float
    w: float
    h: float
    conf: float = 1.0
    cls: int = -1
    vis: float = -1.0

    @property
    def box(self) -> BBox:
        return BBox(self.x, self.y, self.w, self.h)


def _parse_row(line: str, lineno: int) -> MotRow:
    parts = [p.strip() for p in line.split(",")]
    if len(parts) < 6:
        raise ParseError(f"line {lineno}: expected at least 6 comma-separated fields")
    try:
        frame = int(float(parts[0]))
        track_id = int(float(parts[1]))
        x, y, w, h = (float(p) for p in parts[2:6])
        conf = float(parts[6]) if len(parts) > 6 else 1.0
        cls = int(float(parts[7])) if len(parts) > 7 else -1
        vis = float(parts[8]) if len(parts) > 8 else -1.0
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {exc}") from exc
    if frame < 1:
        raise ParseError(f"line {lineno}: frame must be >= 1, got {frame}")
    if not (w > 0 and h > 0):
        raise ParseError(f"line {lineno}: box must have positive size, got w={w}, h={h}")
    return MotRow(frame, track_id, x, y, w, h, conf, cls, vis)


def parse_mot_file(path) -> list[MotRow]:
    """Read every row of a MOT-format file, preserving order."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            rows.append(_parse_row(line, lineno))
    return rows


def format_result_row(row: MotRow) -> str:
    return (f"{row.frame},{row.track_id},{row.x:.2f},{row.y:.2f},"
            f"{row.w:.2f},{row.h:.2f},{row.conf:.4f},-1,-1,-1")


def format_gt_row(row: MotRow) -> str:
    return (f"{row.frame},{row.track_id},{row.x:.2f},{row.y:.2f},"
            f"{row.w:.2f},{row.h:.2f},1,{row.cls},{row.vis:.2f}")


def write_results(path, rows: list[MotRow]) -> None:
    """Write result rows with fixed formatting; rejects invalid records."""
    seen = set()
    for row in rows:
        if row.track_id < 1:
            raise ParseError(f"result rows need id >= 1, got {row.track_id}")
        key = (row.frame, row.track_id)
        if key in seen:
            raise ParseError(f"duplicate (frame, id) record {key}")
        seen.add(key)
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(format_result_row(row) + "\n")


def write_ground_truth(path, rows: list[MotRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(format_gt_row(row) + "\n")


def write_detections(path, rows: list[MotRow]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(format_result_row(row) + "\n")


def read_detections(path, normalize_conf: bool = False) -> dict[int, list[Detection]]:
    """Group detection rows by frame, preserving in-frame order.

    With ``normalize_conf`` the confidences are divided by the file maximum
    when that maximum exceeds 1, then clamped to [0, 1].
    """
    rows = parse_mot_file(path)
    scale = 1.0
    if normalize_conf and rows:
        top = max(r.conf for r in rows)
        if top > 1.0:
            scale = top
    frames: dict[int, list[Detection]] = {}
    for row in rows:
        conf = min(max(row.conf / scale, 0.0), 1.0)
        frames.setdefault(row.frame, []).append(Detection(row.frame, row.box, conf))
    return frames


def read_ground_truth(path, pedestrian_only: bool = True,
                      skip_zero_visibility: bool = True) -> dict[int, list[tuple[int, BBox]]]:
    """Ground-truth tracks grouped by frame as (id, box) pairs.

    MOT gt rows carry a consider-flag in the conf column, a class id, and a
    visibility ratio; non-pedestrian classes (class != 1) and zero-visibility
    rows are skipped when the corresponding flags are on. Rows without
    class/visibility columns are always kept.
    """
    frames: dict[int, list[tuple[int, BBox]]] = {}
    for row in parse_mot_file(path):
        if row.cls != -1:
            if row.conf == 0:
                continue
            if pedestrian_only and row.cls != 1:
                continue
            if skip_zero_visibility and row.vis == 0.0:
                continue
        frames.setdefault(row.frame, []).append((row.track_id, row.box))
    return frames


def read_results(path) -> dict[int, list[tuple[int, BBox]]]:
    """Tracker output grouped by frame as (id, box) pairs."""
    frames: dict[int, list[tuple[int, BBox]]] = {}
    for row in parse_mot_file(path):
        if row.track_id < 1:
            raise ParseError(f"result rows need id >= 1, got {row.track_id}")
        frames.setdefault(row.frame, []).append((row.track_id, row.box))
    return frames


def read_external_similarity(path) -> dict[int, list[tuple[int, int, float]]]:
    """Sparse per-frame appearance similarities: lines ``frame,i,j,value``.

    Missing entries are 0; the (i, j) indices address the frame's detection
    and tracklet snapshots in pipeline order.
    """
    out: dict[int, list[tuple[int, int, float]]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ParseError(f"line {lineno}: expected frame,i,j,value")
            try:
                frame, i, j = int(parts[0]), int(parts[1]), int(parts[2])
                value = float(parts[3])
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from exc
            out.setdefault(frame, []).append((i, j, value))
    return out


def materialize_external(entries: list[tuple[int, int, float]], n: int, m: int) -> np.ndarray:
    mat = np.zeros((n, m))
    for i, j, value in entries:
        if not (0 <= i < n and 0 <= j < m):
            raise ContractError(f"external similarity index ({i}, {j}) outside ({n}, {m})")
        mat[i, j] = value
    return mat


# Dataset presets: the implied IoU needed to clear tau under the plain boost
# is tau / beta_c = 0.923 (mot17) and 0.8 (mot20).
PRESETS = {
    "mot17": {"tau": 0.6, "beta_c": 0.65},
    "mot20": {"tau": 0.4, "beta_c": 0.5},
}


@dataclass(frozen=True)
class RunConfig:
    """Full tracker configuration; every field is config-file overridable."""

    preset: str = ""
    # boost
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
    use_dlo_boost: bool = True
    use_novelty_boost: bool = True
    novelty_gate: float = CHI2_4_P95
    # association similarity
    lambda_iou: float = 0.5
    lambda_mhd: float = 0.25
    lambda_shape: float = 0.25
    lambda_app: float = 0.0
    conf_mode: str = "product"
    # motion noise
    obs_pos_weight: float = 1.0 / 20
    obs_ratio_std: float = 0.1
    proc_pos_weight: float = 1.0 / 20
    proc_ratio_std: float = 1e-2
    proc_vel_weight: float = 1.0 / 160
    proc_ratio_vel_std: float = 1e-4
    init_vel_var_mult: float = 10.0
    # lifecycle
    tau_s: float = 0.3
    tau_init: float = -1.0  # < 0 means "tau + 0.1"
    max_age: int = 30
    horizon: int = 30
    min_hits: int = 1
    interpolate_gap: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.preset and self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.conf_mode not in CONF_MODES:
            raise ConfigError(f"conf_mode must be one of {CONF_MODES}")
        for name in ("tau", "tau_s"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        for name in ("max_age", "horizon", "min_hits"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.interpolate_gap < 0:
            raise ConfigError("interpolate_gap must be >= 0")
        # Constructing the sub-configs validates their own ranges.
        try:
            self.boost_config()
            self.weights()
            self.noise()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def creation_threshold(self) -> float:
        return self.tau + 0.1 if self.tau_init < 0 else self.tau_init

    def boost_config(self) -> BoostConfig:
        return BoostConfig(beta_c=self.beta_c, alpha=self.alpha, q=self.q,
                           beta_high=self.beta_high, beta_low=self.beta_low,
                           gamma=self.gamma, tau=self.tau,
                           use_s=self.use_s, use_sb=self.use_sb, use_vt=self.use_vt,
                           novelty_gate=self.novelty_gate)

    def weights(self) -> SimilarityWeights:
        return SimilarityWeights(lambda_iou=self.lambda_iou, lambda_mhd=self.lambda_mhd,
                                 lambda_shape=self.lambda_shape, lambda_app=self.lambda_app)

    def noise(self) -> NoiseConfig:
        return NoiseConfig(obs_pos_weight=self.obs_pos_weight,
                           obs_ratio_std=self.obs_ratio_std,
                           proc_pos_weight=self.proc_pos_weight,
                           proc_ratio_std=self.proc_ratio_std,
                           proc_vel_weight=self.proc_vel_weight,
                           proc_ratio_vel_std=self.proc_ratio_vel_std,
                           init_vel_var_mult=self.init_vel_var_mult)


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _convert(name: str, raw: str, kind: type):
    raw = raw.strip()
    if kind is bool:
        low = raw.lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def read_kv_file(path) -> dict[str, str]:
    """Flat ``key = value`` file with # comments and blank lines."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            key = key.strip()
            if key in out:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            out[key] = value.strip()
    return out


def coerce_mapping(cls, pairs: dict[str, str]) -> dict[str, object]:
    """Convert raw string pairs to a dataclass's field types; unknown keys are errors."""
    known = {f.name for f in fields(cls)}
    unknown = set(pairs) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values: dict[str, object] = {}
    for name, raw in pairs.items():
        default = getattr(cls, name)
        kind = bool if isinstance(default, bool) else type(default)
        values[name] = _convert(name, raw, kind)
    return values


def config_from_mapping(pairs: dict[str, str]) -> RunConfig:
    """Build a RunConfig from raw string pairs; explicit keys override the preset."""
    values = coerce_mapping(RunConfig, pairs)
    preset = values.get("preset", "")
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        values = {**PRESETS[preset], **values}
    return RunConfig(**values)


def read_run_config(path) -> RunConfig:
    return config_from_mapping(read_kv_file(path))
