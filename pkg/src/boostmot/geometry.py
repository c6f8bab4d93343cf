"""Bounding-box algebra: IoU, box buffering, and confidence-scaled buffered IoU.

Boxes are stored in top-left/width/height form; corner and center forms are
produced by explicit conversions only. All geometry is double precision, no
pixel snapping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfidenceError, GeometryError
from .kernels import iou_matrix, soft_biou_matrix


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box: top-left corner plus width and height, in pixels."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h

    def to_xyxy(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.x2, self.y2)

    @classmethod
    def from_xyxy(cls, x1: float, y1: float, x2: float, y2: float) -> "BBox":
        return cls(x1, y1, x2 - x1, y2 - y1)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.w, self.h], dtype=np.float64)


def validate_box(b: BBox) -> None:
    """Reject boxes that cannot participate in a similarity computation."""
    if not (b.w > 0 and b.h > 0):
        raise GeometryError(f"box must have positive width and height, got w={b.w}, h={b.h}")
    if not (math.isfinite(b.x) and math.isfinite(b.y) and math.isfinite(b.w) and math.isfinite(b.h)):
        raise GeometryError("box coordinates must be finite")


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes; 0 when disjoint or edge-touching."""
    validate_box(a)
    validate_box(b)
    ix = min(a.x2, b.x2) - max(a.x, b.x)
    iy = min(a.y2, b.y2) - max(a.y, b.y)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    union = a.w * a.h + b.w * b.h - inter
    return inter / union


def buffer_box(o: BBox, s: float) -> BBox:
    """Grow a box symmetrically: width by 2*s*w, height by 2*s*h, same center."""
    validate_box(o)
    if s < 0:
        raise GeometryError(f"buffer scale must be >= 0, got {s}")
    return BBox(o.x - s * o.w, o.y - s * o.h, o.w + 2.0 * s * o.w, o.h + 2.0 * s * o.h)


def soft_biou(d: BBox, t: BBox, c_t: float) -> float:
    """Buffered IoU with tracklet-confidence-driven scales.

    The tracklet box is buffered by (1 - c_t)/2, the detection by half that,
    since the detected position is trusted more than the predicted one.
    Reduces exactly to plain IoU at c_t = 1.
    """
    if not (0.0 <= c_t <= 1.0):
        raise ConfidenceError(f"tracklet confidence must lie in [0, 1], got {c_t}")
    return iou(buffer_box(d, (1.0 - c_t) / 4.0), buffer_box(t, (1.0 - c_t) / 2.0))


def validate_boxes_array(boxes: np.ndarray, name: str = "boxes") -> np.ndarray:
    """Validate an (n, 4) tlwh array for matrix-level geometry."""
    boxes = np.asarray(boxes, dtype=np.float64)
    if boxes.ndim != 2 or boxes.shape[1] != 4:
        raise GeometryError(f"{name} must have shape (n, 4), got {boxes.shape}")
    if boxes.size and not np.isfinite(boxes).all():
        raise GeometryError(f"{name} contains non-finite values")
    if boxes.size and not ((boxes[:, 2] > 0) & (boxes[:, 3] > 0)).all():
        raise GeometryError(f"{name} contains non-positive widths or heights")
    return np.ascontiguousarray(boxes)


def iou_batch(dets: np.ndarray, trks: np.ndarray) -> np.ndarray:
    """Pairwise IoU between (n, 4) and (m, 4) tlwh arrays."""
    dets = validate_boxes_array(dets, "detections")
    trks = validate_boxes_array(trks, "tracklets")
    return iou_matrix(dets, trks)


def soft_biou_batch(dets: np.ndarray, trks: np.ndarray, trk_conf: np.ndarray) -> np.ndarray:
    """Pairwise soft buffered IoU; column j uses tracklet j's confidence."""
    dets = validate_boxes_array(dets, "detections")
    trks = validate_boxes_array(trks, "tracklets")
    trk_conf = np.ascontiguousarray(np.asarray(trk_conf, dtype=np.float64))
    if trk_conf.shape != (trks.shape[0],):
        raise GeometryError(f"trk_conf must have shape ({trks.shape[0]},), got {trk_conf.shape}")
    if trk_conf.size and (not np.isfinite(trk_conf).all() or (trk_conf < 0).any() or (trk_conf > 1).any()):
        raise ConfidenceError("tracklet confidences must lie in [0, 1]")
    return soft_biou_matrix(dets, trks, trk_conf)
