"""Confidence-boosted one-stage tracking-by-detection.

Pipeline: constant-velocity Kalman prediction, detection-confidence boosting
(plain, soft, and varying-threshold variants over IoU or an averaged
soft-BIoU/Mahalanobis/shape similarity), single-stage optimal association,
MOT-format I/O, CLEAR/IDF1 evaluation, and a seeded synthetic scene harness.
"""

__version__ = "0.1.0"

from .association import Assignment, associate, hungarian
from .boost import (BoostConfig, dlo_boost, idc_boost, mahalanobis_novelty_boost,
                    soft_boost, varying_threshold, vt_boost)
from .dataio import Detection, MotRow, RunConfig, read_detections, read_run_config
from .geometry import BBox, buffer_box, iou, iou_batch, soft_biou, soft_biou_batch
from .kernels import BACKEND
from .metrics import EvalReport, count_ids, count_idsw, evaluate
from .motion import KalmanState, NoiseConfig, predict, update
from .similarity import SimilarityWeights, association_similarity, boost_similarity
from .simulate import SceneConfig, generate, iou_decay_study
from .tracker import FrameResult, Tracker, Tracklet, run_sequence

__all__ = [
    "__version__", "BACKEND",
    "BBox", "iou", "buffer_box", "soft_biou", "iou_batch", "soft_biou_batch",
    "KalmanState", "NoiseConfig", "predict", "update",
    "SimilarityWeights", "association_similarity", "boost_similarity",
    "BoostConfig", "dlo_boost", "soft_boost", "varying_threshold", "vt_boost",
    "idc_boost", "mahalanobis_novelty_boost",
    "Assignment", "hungarian", "associate",
    "Detection", "MotRow", "RunConfig", "read_detections", "read_run_config",
    "EvalReport", "evaluate", "count_ids", "count_idsw",
    "SceneConfig", "generate", "iou_decay_study",
    "Tracker", "Tracklet", "FrameResult", "run_sequence",
]
