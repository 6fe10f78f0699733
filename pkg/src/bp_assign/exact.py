"""Exact solvers for the minimum-cost assignment problem.

`solve_exact` delegates to scipy's dense shortest-augmenting-path solver
(deterministic, O(n^3) worst case); `solve_bruteforce` enumerates every
permutation and is the independent ground truth for small n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .bp import BipartiteDecision, as_cost_array

BRUTE_FORCE_LIMIT = 10
_PERM_CHUNK = 40320


@dataclass(eq=False)
class Assignment:
    """A perfect matching given as the row-to-column permutation and its cost."""

    row_to_col: np.ndarray
    value: float

    @property
    def n(self) -> int:
        return self.row_to_col.shape[0]

    def as_decision(self) -> BipartiteDecision:
        """View the permutation as a (consistent) decision on both sides."""
        inverse = np.empty(self.n, dtype=np.int64)
        inverse[self.row_to_col] = np.arange(self.n)
        return BipartiteDecision(row_choice=self.row_to_col.copy(), col_choice=inverse)


def solve_exact(cost) -> Assignment:
    """Minimum-cost perfect matching via successive shortest augmenting paths."""
    x = as_cost_array(cost)
    _, cols = linear_sum_assignment(x)
    perm = cols.astype(np.int64)
    value = float(x[np.arange(x.shape[0]), perm].sum())
    return Assignment(row_to_col=perm, value=value)


def solve_bruteforce(cost) -> Assignment:
    """Exhaustive minimum over all n! permutations, n <= 10.

    Permutations are scanned in lexicographic order and only strict
    improvements are kept, so exact value ties resolve to the lowest
    lexicographic permutation.
    """
    x = as_cost_array(cost)
    n = x.shape[0]
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is capped at n={BRUTE_FORCE_LIMIT}, got {n}")
    rows = np.arange(n)
    best_value = np.inf
    best_perm: np.ndarray | None = None
    perms = itertools.permutations(range(n))
    while True:
        chunk = np.array(list(itertools.islice(perms, _PERM_CHUNK)), dtype=np.int64)
        if chunk.size == 0:
            break
        values = x[rows[None, :], chunk].sum(axis=1)
        i = int(values.argmin())
        if values[i] < best_value:
            best_value = values[i]
            best_perm = chunk[i]
    return Assignment(row_to_col=best_perm, value=float(best_value))
