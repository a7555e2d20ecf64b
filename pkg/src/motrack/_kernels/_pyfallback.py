"""Pure-Python/numpy implementations of the hot kernels.

These are the reference semantics for the compiled extension: ``solve_lap``
mirrors the Cython version loop for loop so both backends produce identical
assignments and dual variables, and the array kernels apply the same
per-entry arithmetic in the same order so results match bit for bit.
"""

from __future__ import annotations

import numpy as np

NAME = "python"

_INF = float("inf")


def solve_lap(cost: np.ndarray):
    """Solve the rectangular min-cost assignment problem.

    Shortest augmenting path construction (one path per row), for an n x m
    matrix with n <= m and finite entries.  Returns ``(col4row, row4col, u, v)``
    where ``col4row[i]`` is the column matched to row ``i`` (always valid),
    ``row4col[j]`` is the row matched to column ``j`` or -1, and ``u``/``v``
    are the dual potentials: every matched edge has zero reduced cost and
    reduced costs are non-negative everywhere at completion.
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n, m = cost.shape
    if n > m:
        raise ValueError("solve_lap requires n <= m")

    u = np.zeros(n, dtype=np.float64)
    v = np.zeros(m, dtype=np.float64)
    col4row = np.full(n, -1, dtype=np.intp)
    row4col = np.full(m, -1, dtype=np.intp)

    shortest = np.empty(m, dtype=np.float64)
    pred = np.empty(m, dtype=np.intp)   # predecessor row on the path to column j
    done = np.empty(m, dtype=np.bool_)  # column already scanned from

    for cur_row in range(n):
        shortest[:] = _INF
        done[:] = False
        min_val = 0.0
        i = cur_row
        sink = -1
        while sink == -1:
            lowest = _INF
            j_lowest = -1
            ui = u[i]
            for j in range(m):
                if done[j]:
                    continue
                r = min_val + cost[i, j] - ui - v[j]
                if r < shortest[j]:
                    shortest[j] = r
                    pred[j] = i
                # Prefer an unmatched column on ties so paths stay short and
                # the scan order (ascending j) fixes the result.
                if shortest[j] < lowest or (shortest[j] == lowest and row4col[j] == -1):
                    lowest = shortest[j]
                    j_lowest = j
            min_val = lowest
            j = j_lowest
            done[j] = True
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]

        # Update duals: scanned columns move by their path slack, rows follow.
        u[cur_row] += min_val
        for j in range(m):
            if done[j] and j != sink:
                delta = min_val - shortest[j]
                v[j] -= delta
                u[row4col[j]] += delta

        # Augment along the alternating path back to cur_row.
        j = sink
        while True:
            i = pred[j]
            row4col[j] = i
            col4row[i], j = j, col4row[i]
            if i == cur_row:
                break

    return col4row, row4col, u, v


def pairwise_iou(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Intersection over union for every (row of a, row of b) box pair.

    Boxes are (x, y, w, h) rows; degenerate unions yield 0.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    ax1, ay1 = a[:, 0:1], a[:, 1:2]
    ax2, ay2 = ax1 + a[:, 2:3], ay1 + a[:, 3:4]
    bx1, by1 = b[None, :, 0], b[None, :, 1]
    bx2, by2 = bx1 + b[None, :, 2], by1 + b[None, :, 3]

    iw = np.maximum(0.0, np.minimum(ax2, bx2) - np.maximum(ax1, bx1))
    ih = np.maximum(0.0, np.minimum(ay2, by2) - np.maximum(ay1, by1))
    inter = iw * ih
    union = a[:, 2:3] * a[:, 3:4] + (b[None, :, 2] * b[None, :, 3]) - inter
    out = np.zeros((a.shape[0], b.shape[0]), dtype=np.float64)
    np.divide(inter, union, out=out, where=union > 0)
    np.minimum(out, 1.0, out=out)  # rounding can overshoot 1 for sliver boxes
    return out


def mahalanobis_batch(chol: np.ndarray, means: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Squared Mahalanobis distances for T tracks against M points.

    ``chol`` holds the lower Cholesky factors (T, d, d) of the innovation
    covariances, ``means`` the projected means (T, d), ``points`` the
    measurements (M, d).  Forward substitution is unrolled with the same
    operation order as the compiled kernel.
    """
    chol = np.ascontiguousarray(chol, dtype=np.float64)
    means = np.ascontiguousarray(means, dtype=np.float64)
    points = np.ascontiguousarray(points, dtype=np.float64)
    t, d, _ = chol.shape
    mcount = points.shape[0]
    out = np.zeros((t, mcount), dtype=np.float64)
    # diff[k] has shape (T, M); z computed row by row of the triangular factor
    diff = [points[None, :, k] - means[:, k, None] for k in range(d)]
    z = []
    for r in range(d):
        acc = diff[r]
        for c in range(r):
            acc = acc - chol[:, r, c, None] * z[c]
        zr = acc / chol[:, r, r, None]
        z.append(zr)
        out += zr * zr
    return out
