# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled per-frame hot kernels: pairwise IoU, soft buffered IoU, and the
rectangular assignment solve.

Twin of ``kernels_py``: the expression structure matches the NumPy fallback
so both backends produce bit-identical results.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND_NAME = "cython"


def iou_matrix(double[:, ::1] dets, double[:, ::1] trks):
    """Pairwise IoU between (n, 4) and (m, 4) tlwh boxes."""
    cdef Py_ssize_t n = dets.shape[0]
    cdef Py_ssize_t m = trks.shape[0]
    out_arr = np.zeros((n, m), dtype=np.float64)
    if n == 0 or m == 0:
        return out_arr
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double ax1, ay1, ax2, ay2, area_a
    cdef double bx1, by1, bx2, by2
    cdef double ix, iy, inter, union_

    for i in range(n):
        ax1 = dets[i, 0]
        ay1 = dets[i, 1]
        ax2 = ax1 + dets[i, 2]
        ay2 = ay1 + dets[i, 3]
        area_a = dets[i, 2] * dets[i, 3]
        for j in range(m):
            bx1 = trks[j, 0]
            by1 = trks[j, 1]
            bx2 = bx1 + trks[j, 2]
            by2 = by1 + trks[j, 3]
            ix = (ax2 if ax2 < bx2 else bx2) - (ax1 if ax1 > bx1 else bx1)
            iy = (ay2 if ay2 < by2 else by2) - (ay1 if ay1 > by1 else by1)
            inter = (ix if ix > 0.0 else 0.0) * (iy if iy > 0.0 else 0.0)
            union_ = area_a + trks[j, 2] * trks[j, 3] - inter
            out[i, j] = inter / union_
    return out_arr


def soft_biou_matrix(double[:, ::1] dets, double[:, ::1] trks, double[::1] trk_conf):
    """Pairwise buffered IoU where column j's buffer scales shrink with tracklet confidence."""
    cdef Py_ssize_t n = dets.shape[0]
    cdef Py_ssize_t m = trks.shape[0]
    out_arr = np.zeros((n, m), dtype=np.float64)
    if n == 0 or m == 0:
        return out_arr
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double sd, st, tdw, tdh, ttw, tth
    cdef double dx1, dy1, dw, dh, dx2, dy2
    cdef double tx1, ty1, tw, th, tx2, ty2
    cdef double ix, iy, inter, union_

    for j in range(m):
        sd = (1.0 - trk_conf[j]) * 0.25
        st = (1.0 - trk_conf[j]) * 0.5
        ttw = st * trks[j, 2]
        tth = st * trks[j, 3]
        tx1 = trks[j, 0] - ttw
        ty1 = trks[j, 1] - tth
        tw = trks[j, 2] + 2.0 * ttw
        th = trks[j, 3] + 2.0 * tth
        tx2 = tx1 + tw
        ty2 = ty1 + th
        for i in range(n):
            tdw = sd * dets[i, 2]
            tdh = sd * dets[i, 3]
            dx1 = dets[i, 0] - tdw
            dy1 = dets[i, 1] - tdh
            dw = dets[i, 2] + 2.0 * tdw
            dh = dets[i, 3] + 2.0 * tdh
            dx2 = dx1 + dw
            dy2 = dy1 + dh
            ix = (dx2 if dx2 < tx2 else tx2) - (dx1 if dx1 > tx1 else tx1)
            iy = (dy2 if dy2 < ty2 else ty2) - (dy1 if dy1 > ty1 else ty1)
            inter = (ix if ix > 0.0 else 0.0) * (iy if iy > 0.0 else 0.0)
            union_ = dw * dh + tw * th - inter
            out[i, j] = inter / union_
    return out_arr


cdef Py_ssize_t _augment(double[:, ::1] cost, double[::1] u, double[::1] v,
                         Py_ssize_t[::1] path, Py_ssize_t[::1] row4col,
                         double[::1] shortest, cnp.uint8_t[::1] SR, cnp.uint8_t[::1] SC,
                         Py_ssize_t[::1] remaining, Py_ssize_t cur_row,
                         double* min_val_out):
    cdef Py_ssize_t nr = cost.shape[0]
    cdef Py_ssize_t nc = cost.shape[1]
    cdef double min_val = 0.0
    cdef Py_ssize_t num_remaining = nc
    cdef Py_ssize_t it, i, j, index, sink
    cdef double r, lowest
    cdef bint free, index_free

    for it in range(nc):
        remaining[it] = it
    for it in range(nc):
        shortest[it] = INFINITY
        SC[it] = 0
    for it in range(nr):
        SR[it] = 0

    i = cur_row
    sink = -1
    while sink == -1:
        SR[i] = 1
        index = -1
        index_free = False
        lowest = INFINITY
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
            min_val_out[0] = min_val
            return -1

        j = remaining[index]
        if row4col[j] == -1:
            sink = j
        else:
            i = row4col[j]
        SC[j] = 1
        num_remaining -= 1
        remaining[index] = remaining[num_remaining]
    min_val_out[0] = min_val
    return sink


def solve_lap_core(double[:, ::1] cost):
    """Solve the rectangular assignment problem for cost with n <= m rows."""
    cdef Py_ssize_t nr = cost.shape[0]
    cdef Py_ssize_t nc = cost.shape[1]
    u_arr = np.zeros(nr)
    v_arr = np.zeros(nc)
    path_arr = np.full(nc, -1, dtype=np.intp)
    col4row_arr = np.full(nr, -1, dtype=np.intp)
    row4col_arr = np.full(nc, -1, dtype=np.intp)
    shortest_arr = np.empty(nc)
    SR_arr = np.empty(nr, dtype=np.uint8)
    SC_arr = np.empty(nc, dtype=np.uint8)
    remaining_arr = np.empty(nc, dtype=np.intp)

    cdef double[::1] u = u_arr
    cdef double[::1] v = v_arr
    cdef Py_ssize_t[::1] path = path_arr
    cdef Py_ssize_t[::1] col4row = col4row_arr
    cdef Py_ssize_t[::1] row4col = row4col_arr
    cdef double[::1] shortest = shortest_arr
    cdef cnp.uint8_t[::1] SR = SR_arr
    cdef cnp.uint8_t[::1] SC = SC_arr
    cdef Py_ssize_t[::1] remaining = remaining_arr

    cdef Py_ssize_t cur_row, sink, i, j, tmp
    cdef double min_val

    for cur_row in range(nr):
        sink = _augment(cost, u, v, path, row4col, shortest, SR, SC, remaining,
                        cur_row, &min_val)
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
            tmp = col4row[i]
            col4row[i] = j
            j = tmp
            if i == cur_row:
                break
    return col4row_arr


def solve_lap(cost):
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
