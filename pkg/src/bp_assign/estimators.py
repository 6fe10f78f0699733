"""Scikit-learn style estimator wrappers around the assignment solvers.

Both estimators consume a square cost matrix as X, follow the fit /
fit_predict protocol and expose their results through trailing-underscore
attributes, so they compose with cloning, parameter search and pipelines.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from . import bp, metrics
from .exact import solve_exact


def check_cost_matrix(X) -> np.ndarray:
    """Validate a square, finite cost matrix and return it as float64."""
    return bp.as_cost_array(X)


class BeliefPropagationAssignment(BaseEstimator):
    """Min-sum message-passing solver for square assignment problems.

    Parameters
    ----------
    n_iter : int, default=30
        Number of synchronous message updates before reading decisions.
    record_history : bool, default=False
        Keep the decision after every step in ``history_``.

    Attributes
    ----------
    row_assignment_ : ndarray of shape (n,)
        Column chosen by each row (may contain collisions).
    col_assignment_ : ndarray of shape (n,)
        Row chosen by each column.
    is_matching_ : bool
        Whether the two choice vectors form a perfect matching.
    message_state_ : MessageState
        Final message tables.
    history_ : list of BipartiteDecision
        Per-step decisions, only when record_history is set.
    """

    def __init__(self, n_iter: int = 30, record_history: bool = False):
        self.n_iter = n_iter
        self.record_history = record_history

    def fit(self, X, y=None):
        x = check_cost_matrix(X)
        result = bp.run(x, self.n_iter, record_history=self.record_history)
        self.n_ = x.shape[0]
        self.message_state_ = result.state
        self.row_assignment_ = result.decision.row_choice
        self.col_assignment_ = result.decision.col_choice
        self.is_matching_ = metrics.is_perfect_matching(result.decision)
        if self.record_history:
            self.history_ = result.history
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        """Fit and return the per-row column choices."""
        return self.fit(X).row_assignment_


class ExactAssignment(BaseEstimator):
    """Exact minimum-cost assignment solver with the same estimator surface.

    Attributes
    ----------
    row_assignment_ : ndarray of shape (n,)
        Optimal permutation (row i is matched to column row_assignment_[i]).
    value_ : float
        Total cost of the optimal assignment.
    """

    def fit(self, X, y=None):
        x = check_cost_matrix(X)
        assignment = solve_exact(x)
        self.n_ = x.shape[0]
        self.row_assignment_ = assignment.row_to_col
        self.value_ = assignment.value
        return self

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).row_assignment_
