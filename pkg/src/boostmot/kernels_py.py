"""Pure-NumPy implementations of the per-frame hot kernels.

These are the fallback twins of the compiled versions in ``_kernels.pyx``.
Expression structure is kept identical to the compiled code so both backends
produce bit-identical results; tests assert that equivalence.

Inputs are assumed validated (finite, positive sizes); validation lives in
the calling modules.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def iou_matrix(dets: np.ndarray, trks: np.ndarray) -> np.ndarray:
    """Pairwise IoU between (n, 4) and (m, 4) tlwh boxes."""
    n, m = dets.shape[0], trks.shape[0]
    if n == 0 or m == 0:
        return np.zeros((n, m), dtype=np.float64)
    ax1, ay1, aw, ah = dets[:, 0], dets[:, 1], dets[:, 2], dets[:, 3]
    bx1, by1, bw, bh = trks[:, 0], trks[:, 1], trks[:, 2], trks[:, 3]
    ax2, ay2 = ax1 + aw, ay1 + ah
    bx2, by2 = bx1 + bw, by1 + bh

    ix = np.minimum(ax2[:, None], bx2[None, :]) - np.maximum(ax1[:, None], bx1[None, :])
    iy = np.minimum(ay2[:, None], by2[None, :]) - np.maximum(ay1[:, None], by1[None, :])
    inter = np.maximum(ix, 0.0) * np.maximum(iy, 0.0)
    union = (aw * ah)[:, None] + (bw * bh)[None, :] - inter
    return inter / union


def soft_biou_matrix(dets: np.ndarray, trks: np.ndarray, trk_conf: np.ndarray) -> np.ndarray:
    """Pairwise buffered IoU where column j's buffer scales shrink with tracklet confidence.

    Detection boxes are buffered by (1 - c_j)/4 and tracklet boxes by
    (1 - c_j)/2; at c_j = 1 this is plain IoU.
    """
    n, m = dets.shape[0], trks.shape[0]
    if n == 0 or m == 0:
        return np.zeros((n, m), dtype=np.float64)
    one_minus = 1.0 - trk_conf
    sd = one_minus * 0.25
    st = one_minus * 0.5

    ax1, ay1, aw, ah = dets[:, 0], dets[:, 1], dets[:, 2], dets[:, 3]
    bx1, by1, bw, bh = trks[:, 0], trks[:, 1], trks[:, 2], trks[:, 3]

    # Detection buffers vary per (i, j) pair; broadcast to (n, m).
    tdw = sd[None, :] * aw[:, None]
    tdh = sd[None, :] * ah[:, None]
    dx1 = ax1[:, None] - tdw
    dy1 = ay1[:, None] - tdh
    dw = aw[:, None] + 2.0 * tdw
    dh = ah[:, None] + 2.0 * tdh
    dx2 = dx1 + dw
    dy2 = dy1 + dh

    ttw = st * bw
    tth = st * bh
    tx1 = bx1 - ttw
    ty1 = by1 - tth
    tw = bw + 2.0 * ttw
    th = bh + 2.0 * tth
    tx2 = tx1 + tw
    ty2 = ty1 + th

    ix = np.minimum(dx2, tx2[None, :]) - np.maximum(dx1, tx1[None, :])
    iy = np.minimum(dy2, ty2[None, :]) - np.maximum(dy1, ty1[None, :])
    inter = np.maximum(ix, 0.0) * np.maximum(iy, 0.0)
    union = dw * dh + (tw * th)[None, :] - inter
    return inter / union


def _augment(cost, u, v, path, row4col, shortest, SR, SC, remaining, cur_row):
    """Dijkstra-style search for a shortest augmenting path from cur_row.

    Returns (sink column, path cost). Mirrors the compiled version exactly,
    including the swap-removal scan order that fixes tie-breaking.
    """
    nc = cost.shape[1]
    min_val = 0.0
    num_remaining = nc
    for it in range(nc):
        remaining[it] = it
    shortest[:] = np.inf
    SR[:] = False
    SC[:] = False

    i = cur_row
    sink = -1
    while sink == -1:
        SR[i] = True
        index = -1
        index_free = False
        lowest = np.inf
        for it in range(num_remaining):
            j = remaining[it]
            r = min_val + cost[i, j] - u[i] - v[j]
            if r < shortest[j]:
                path[j] = i
                shortest[j] = r
            # Ties prefer the first unassigned column, keeping the
            # assignment lexicographic on degenerate costs.
            free = row4col[j] == -1
            if shortest[j] < lowest or (shortest[j] == lowest and free and not index_free):
                lowest = shortest[j]
                index = it
                index_free = free
        min_val = lowest
        if index == -1:
            return -1, min_val

        j = remaining[index]
        if row4col[j] == -1:
            sink = j
        else:
            i = row4col[j]
        SC[j] = True
        num_remaining -= 1
        remaining[index] = remaining[num_remaining]
    return sink, min_val


def solve_lap_core(cost: np.ndarray) -> np.ndarray:
    """Solve the rectangular assignment problem for cost with n <= m rows.

    Returns col4row: for each row, the assigned column index.
    """
    nr, nc = cost.shape
    u = np.zeros(nr)
    v = np.zeros(nc)
    path = np.full(nc, -1, dtype=np.intp)
    col4row = np.full(nr, -1, dtype=np.intp)
    row4col = np.full(nc, -1, dtype=np.intp)
    shortest = np.empty(nc)
    SR = np.empty(nr, dtype=bool)
    SC = np.empty(nc, dtype=bool)
    remaining = np.empty(nc, dtype=np.intp)

    for cur_row in range(nr):
        sink, min_val = _augment(cost, u, v, path, row4col, shortest, SR, SC, remaining, cur_row)
        if sink < 0:
            raise RuntimeError("cost matrix is infeasible")
        u[cur_row] += min_val
        for i in range(nr):
            if SR[i] and i != cur_row:
                u[i] += min_val - shortest[col4row[i]]
        for j in range(nc):
            if SC[j]:
                v[j] -= min_val - shortest[j]
        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            col4row[i], j = j, col4row[i]
            if i == cur_row:
                break
    return col4row


def solve_lap(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimal-cost assignment over a finite rectangular matrix.

    Returns (rows, cols) of length min(n, m) with rows sorted ascending.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n, m = cost.shape
    if n == 0 or m == 0:
        return np.empty(0, dtype=np.intp), np.empty(0, dtype=np.intp)
    if n <= m:
        col4row = solve_lap_core(cost)
        rows = np.arange(n, dtype=np.intp)
        return rows, col4row
    col4row = solve_lap_core(np.ascontiguousarray(cost.T))
    order = np.argsort(col4row, kind="stable")
    return col4row[order], np.arange(m, dtype=np.intp)[order]
