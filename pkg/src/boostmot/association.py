"""One-stage optimal detection-tracklet assignment with admissibility gating."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CostMatrixError
from .kernels import solve_lap


@dataclass
class Assignment:
    """Matched index pairs plus the leftover detections and tracklets."""

    matches: list[tuple[int, int]] = field(default_factory=list)
    unmatched_detections: list[int] = field(default_factory=list)
    unmatched_tracklets: list[int] = field(default_factory=list)


def hungarian(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimal-cost assignment of min(n, m) pairs over a finite cost matrix.

    Deterministic: rows are processed in index order and ties resolve toward
    lower column indices, so repeated runs give identical assignments.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise CostMatrixError(f"cost matrix must be 2-D, got shape {cost.shape}")
    if cost.size and not np.isfinite(cost).all():
        raise CostMatrixError("cost matrix contains non-finite entries")
    return solve_lap(cost)


def associate(similarity: np.ndarray, tau_s: float) -> Assignment:
    """Single-stage assignment maximizing total similarity.

    Runs the minimal-cost assignment on the negated similarity, then strips
    any produced pair at or below tau_s (strict > is admissible), reporting
    both endpoints as unmatched.
    """
    similarity = np.asarray(similarity, dtype=np.float64)
    n, m = similarity.shape
    rows, cols = hungarian(-similarity)

    out = Assignment()
    matched_d = set()
    matched_t = set()
    for i, j in zip(rows.tolist(), cols.tolist()):
        if similarity[i, j] > tau_s:
            out.matches.append((i, j))
            matched_d.add(i)
            matched_t.add(j)
    out.unmatched_detections = [i for i in range(n) if i not in matched_d]
    out.unmatched_tracklets = [j for j in range(m) if j not in matched_t]
    return out
