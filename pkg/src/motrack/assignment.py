"""Exact min-cost bipartite matching over rectangular cost matrices.

The solver returns, among all maximum-cardinality matchings of minimum total
cost, the one whose sorted pair list is lexicographically smallest.  The
optimum is found with a shortest-augmenting-path solver (compiled kernel when
available); the tie-break is then enforced using the dual variables: an edge
can belong to an optimal matching only if its reduced cost is zero, so rows
are fixed in ascending order to their smallest zero-reduced-cost column,
re-solving the remainder only when that column differs from the one already
assigned.  Tie-free instances take the validation scan and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class AssignmentResult:
    """Matched (row, col) pairs plus the leftovers, all in input-matrix indices."""

    pairs: list[tuple[int, int]] = field(default_factory=list)
    unmatched_rows: list[int] = field(default_factory=list)
    unmatched_cols: list[int] = field(default_factory=list)

    def total_cost(self, cost: np.ndarray) -> float:
        return float(sum(cost[r, c] for r, c in self.pairs))


def _solve_oriented(a: np.ndarray):
    """Run the kernel solver on an n x m matrix of any orientation.

    Returns ``(row_to_col, col_to_row, u, v)`` with -1 for unmatched.
    """
    n, m = a.shape
    if n <= m:
        col4row, row4col, u, v = _kernels.solve_lap(a)
        return col4row, row4col, u, v
    col4row, row4col, u, v = _kernels.solve_lap(np.ascontiguousarray(a.T))
    return row4col, col4row, v, u


def _lex_fast_path(a, row_to_col, u, v, eps):
    """Check whether the solver's matching is already the lexicographic one.

    Each matched row must sit on its smallest still-free zero-reduced-cost
    column, and unmatched rows must have no free zero-reduced-cost column at
    their turn; any optimal matching only uses zero-reduced-cost edges, so
    success proves lexicographic minimality.
    """
    n, m = a.shape
    col_free = np.ones(m, dtype=bool)
    for r in range(n):
        reduced = a[r] - u[r] - v
        candidates = np.flatnonzero(col_free & (reduced <= eps))
        c = row_to_col[r]
        if c == -1:
            if candidates.size:
                return False
        else:
            if not candidates.size or candidates[0] != c:
                return False
            col_free[c] = False
    return True


def _lex_refine(a, row_to_col, u, v, eps):
    """Fix rows in ascending order to the lex-smallest optimal assignment.

    Works on shrinking copies of the matrix; every fix is verified by
    re-solving the remainder, so the result is exact regardless of how
    degenerate the duals are.
    """
    orig_rows = list(range(a.shape[0]))
    orig_cols = list(range(a.shape[1]))
    pairs: list[tuple[int, int]] = []

    while orig_rows and orig_cols:
        n, m = a.shape
        total = sum(a[r, row_to_col[r]] for r in range(n) if row_to_col[r] != -1)
        reduced = a[0] - u[0] - v
        candidates = np.flatnonzero(reduced <= eps)
        assigned = row_to_col[0]

        chosen = -1
        fresh = None
        if assigned != -1 and candidates.size and candidates[0] == assigned:
            chosen = assigned
        else:
            for c in candidates:
                if c == assigned:
                    chosen = c
                    break
                rest = np.delete(np.delete(a, 0, axis=0), c, axis=1)
                r2c, c2r, ru, rv = _solve_oriented(rest)
                rest_total = sum(rest[i, r2c[i]] for i in range(rest.shape[0]) if r2c[i] != -1)
                if rest_total + a[0, c] <= total + eps:
                    chosen = c
                    fresh = (r2c, c2r, ru, rv)
                    break

        if chosen == -1:
            # No optimal matching uses this row; possible only when rows
            # outnumber columns.
            assert assigned == -1
            a = a[1:]
            row_to_col = row_to_col[1:]
            u = u[1:]
            del orig_rows[0]
            continue

        pairs.append((orig_rows[0], orig_cols[chosen]))
        a = np.delete(np.delete(a, 0, axis=0), chosen, axis=1)
        del orig_rows[0]
        del orig_cols[chosen]
        if fresh is not None:
            row_to_col, _, u, v = fresh
        else:
            # Dropping a matched row/column keeps the rest of the matching
            # optimal and the remaining duals feasible.
            row_to_col = np.array(
                [c - (c > chosen) for c in row_to_col[1:]], dtype=np.intp
            )
            u = u[1:]
            v = np.delete(v, chosen)

    return pairs


def min_cost_matching(
    cost: np.ndarray,
    rows: list[int] | None = None,
    cols: list[int] | None = None,
) -> AssignmentResult:
    """Match the given row subset against the column subset of ``cost``.

    Returns the minimum-total-cost matching of maximum cardinality over the
    induced submatrix, ties broken by the lexicographically smallest sorted
    pair list.  Costs must be finite.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError("cost must be a 2-d matrix")
    rows = sorted(range(cost.shape[0])) if rows is None else sorted(rows)
    cols = sorted(range(cost.shape[1])) if cols is None else sorted(cols)
    if rows and not (0 <= rows[0] and rows[-1] < cost.shape[0]):
        raise IndexError("row subset out of bounds")
    if cols and not (0 <= cols[0] and cols[-1] < cost.shape[1]):
        raise IndexError("column subset out of bounds")

    if not rows or not cols:
        return AssignmentResult([], list(rows), list(cols))

    a = np.ascontiguousarray(cost[np.ix_(rows, cols)])
    if not np.all(np.isfinite(a)):
        raise ValueError("cost entries must be finite")

    row_to_col, col_to_row, u, v = _solve_oriented(a)
    eps = 1e-9 * max(1.0, float(np.abs(a).max()))

    if _lex_fast_path(a, row_to_col, u, v, eps):
        pairs = [(r, int(row_to_col[r])) for r in range(a.shape[0]) if row_to_col[r] != -1]
    else:
        pairs = _lex_refine(a, row_to_col, u, v, eps)

    pairs_mapped = [(rows[r], cols[c]) for r, c in pairs]
    matched_rows = {r for r, _ in pairs_mapped}
    matched_cols = {c for _, c in pairs_mapped}
    return AssignmentResult(
        pairs=pairs_mapped,
        unmatched_rows=[r for r in rows if r not in matched_rows],
        unmatched_cols=[c for c in cols if c not in matched_cols],
    )
