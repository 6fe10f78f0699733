"""Matching predicates, the two-sided Hamming error, and decision repair."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bp import BipartiteDecision, as_cost_array
from .exact import Assignment, solve_exact


def _as_decision(obj) -> BipartiteDecision:
    if isinstance(obj, Assignment):
        return obj.as_decision()
    return obj


def hamming(a, b) -> float:
    """Fraction of the 2n vertices whose chosen partner differs.

    Either argument may be a BipartiteDecision or an Assignment (viewed as
    the decision it induces on both sides).
    """
    da, db = _as_decision(a), _as_decision(b)
    if da.n != db.n:
        raise ValueError(f"size mismatch: {da.n} vs {db.n}")
    diffs = np.count_nonzero(da.row_choice != db.row_choice)
    diffs += np.count_nonzero(da.col_choice != db.col_choice)
    return diffs / (2 * da.n)


def is_perfect_matching(d: BipartiteDecision) -> bool:
    """True iff the row choices are a bijection and the column choices invert it."""
    n = d.n
    if np.unique(d.row_choice).size != n:
        return False
    return bool(np.array_equal(d.col_choice[d.row_choice], np.arange(n)))


def mutual_rows(d: BipartiteDecision) -> np.ndarray:
    """Rows whose chosen column chooses them back."""
    return np.where(d.col_choice[d.row_choice] == np.arange(d.n))[0]


def repair(d: BipartiteDecision, cost) -> Assignment:
    """Turn an arbitrary decision into an honest perfect matching.

    Mutually consistent pairs (row and column picking each other) are kept;
    at most one such pair can involve any vertex, so they form a partial
    matching.  The leftover rows and columns are matched by an exact solve of
    the residual submatrix.
    """
    x = as_cost_array(cost)
    n = x.shape[0]
    keep = mutual_rows(d)
    perm = np.full(n, -1, dtype=np.int64)
    perm[keep] = d.row_choice[keep]
    free_rows = np.setdiff1d(np.arange(n), keep, assume_unique=True)
    if free_rows.size:
        free_cols = np.setdiff1d(np.arange(n), d.row_choice[keep], assume_unique=True)
        sub = solve_exact(x[np.ix_(free_rows, free_cols)])
        perm[free_rows] = free_cols[sub.row_to_col]
    value = float(x[np.arange(n), perm].sum())
    return Assignment(row_to_col=perm, value=value)


@dataclass(frozen=True)
class ErrorReport:
    """One comparison of a decision against the exact optimum.

    collision_count is the number of choices, over both sides, that target a
    partner already claimed by an earlier vertex on the same side.
    """

    hamming: float
    bp_cost_of_repair: float
    exact_cost: float
    collision_count: int


def error_report(d: BipartiteDecision, cost, exact: Assignment | None = None) -> ErrorReport:
    x = as_cost_array(cost)
    if exact is None:
        exact = solve_exact(x)
    repaired = repair(d, x)
    collisions = (d.n - np.unique(d.row_choice).size) + (d.n - np.unique(d.col_choice).size)
    return ErrorReport(
        hamming=hamming(d, exact),
        bp_cost_of_repair=repaired.value,
        exact_cost=exact.value,
        collision_count=int(collisions),
    )
