# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Mirrors ``_pyfallback`` operation for operation so both backends return
identical results; only the execution speed differs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "native"

cdef double INF = float("inf")


def solve_lap(cost):
    """Rectangular min-cost assignment via shortest augmenting paths.

    Requires an n x m matrix with n <= m and finite entries.  Returns
    ``(col4row, row4col, u, v)``; see the fallback module for the contract.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] c = \
        np.ascontiguousarray(cost, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t m = c.shape[1]
    if n > m:
        raise ValueError("solve_lap requires n <= m")

    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.zeros(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] col4row = np.full(n, -1, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] row4col = np.full(m, -1, dtype=np.intp)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] shortest = np.empty(m, dtype=np.float64)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] pred = np.empty(m, dtype=np.intp)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done = np.empty(m, dtype=np.uint8)

    cdef Py_ssize_t cur_row, i, j, sink, j_lowest, tmp
    cdef double min_val, lowest, r, ui, delta

    for cur_row in range(n):
        for j in range(m):
            shortest[j] = INF
            done[j] = 0
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            lowest = INF
            j_lowest = -1
            ui = u[i]
            for j in range(m):
                if done[j]:
                    continue
                r = min_val + c[i, j] - ui - v[j]
                if r < shortest[j]:
                    shortest[j] = r
                    pred[j] = i
                if shortest[j] < lowest or (shortest[j] == lowest and row4col[j] == -1):
                    lowest = shortest[j]
                    j_lowest = j
            min_val = lowest
            j = j_lowest
            done[j] = 1
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]

        u[cur_row] += min_val
        for j in range(m):
            if done[j] and j != sink:
                delta = min_val - shortest[j]
                v[j] -= delta
                u[row4col[j]] += delta

        j = sink
        while True:
            i = pred[j]
            row4col[j] = i
            tmp = col4row[i]
            col4row[i] = j
            j = tmp
            if i == cur_row:
                break

    return col4row, row4col, u, v


def pairwise_iou(a, b):
    """Intersection over union for every (row of a, row of b) box pair."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] aa = \
        np.ascontiguousarray(a, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] bb = \
        np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = aa.shape[0]
    cdef Py_ssize_t m = bb.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] out = \
        np.zeros((n, m), dtype=np.float64)

    cdef Py_ssize_t i, j
    cdef double ax1, ay1, ax2, ay2, bx1, by1, bx2, by2
    cdef double iw, ih, inter, union_, ratio

    for i in range(n):
        ax1 = aa[i, 0]
        ay1 = aa[i, 1]
        ax2 = ax1 + aa[i, 2]
        ay2 = ay1 + aa[i, 3]
        for j in range(m):
            bx1 = bb[j, 0]
            by1 = bb[j, 1]
            bx2 = bx1 + bb[j, 2]
            by2 = by1 + bb[j, 3]
            iw = min(ax2, bx2) - max(ax1, bx1)
            if iw < 0.0:
                iw = 0.0
            ih = min(ay2, by2) - max(ay1, by1)
            if ih < 0.0:
                ih = 0.0
            inter = iw * ih
            union_ = aa[i, 2] * aa[i, 3] + (bb[j, 2] * bb[j, 3]) - inter
            if union_ > 0.0:
                # rounding can overshoot 1 for sliver boxes
                ratio = inter / union_
                out[i, j] = ratio if ratio < 1.0 else 1.0
    return out


def mahalanobis_batch(chol, means, points):
    """Squared Mahalanobis distances for T tracks against M points."""
    cdef cnp.ndarray[cnp.float64_t, ndim=3, mode="c"] L = \
        np.ascontiguousarray(chol, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] y = \
        np.ascontiguousarray(means, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] p = \
        np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t t = L.shape[0]
    cdef Py_ssize_t d = L.shape[1]
    cdef Py_ssize_t mcount = p.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] out = \
        np.zeros((t, mcount), dtype=np.float64)

    cdef Py_ssize_t ti, mi, r, cc
    cdef double acc, total
    cdef double z[64]

    if d > 64:
        raise ValueError("mahalanobis_batch supports dimensions up to 64")

    for ti in range(t):
        for mi in range(mcount):
            total = 0.0
            for r in range(d):
                acc = p[mi, r] - y[ti, r]
                for cc in range(r):
                    acc = acc - L[ti, r, cc] * z[cc]
                z[r] = acc / L[ti, r, r]
                total += z[r] * z[r]
            out[ti, mi] = total
    return out
