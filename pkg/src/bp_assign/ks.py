"""Kolmogorov-Smirnov distances for samples and gridded tail functions."""

from __future__ import annotations

import numpy as np

from .message_law import TailGrid


def _sample(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64).ravel()
    if a.size == 0:
        raise ValueError("empty sample")
    return np.sort(a)


def ks_two_sample(a, b) -> float:
    """Sup distance between the empirical distributions of two samples."""
    sa, sb = _sample(a), _sample(b)
    points = np.concatenate([sa, sb])
    fa = np.searchsorted(sa, points, side="right") / sa.size
    fb = np.searchsorted(sb, points, side="right") / sb.size
    return float(np.max(np.abs(fa - fb)))


def ks_sample_vs_tail(sample, law: TailGrid) -> float:
    """Sup distance between an empirical tail and a gridded tail function.

    The grid is read as the right-continuous step function equal to
    values[m] on [x_m, x_{m+1}), matching tail-function semantics, so a law
    with a jump (such as a point mass) compares exactly.  Both functions
    are piecewise constant; the supremum is attained at a sample point or a
    grid node, approaching from either side, and all four comparison
    families are evaluated.
    """
    s = _sample(sample)
    n = s.size
    xs = law.grid()

    def law_at(points: np.ndarray) -> np.ndarray:
        # value on [x_m, x_{m+1}); 1 below the grid, edge value above
        idx = np.searchsorted(xs, points, side="right") - 1
        out = np.where(idx < 0, 1.0, law.values[np.clip(idx, 0, xs.size - 1)])
        return out

    def law_before(points: np.ndarray) -> np.ndarray:
        # left limit: value on the cell strictly containing points - 0
        idx = np.searchsorted(xs, points, side="left") - 1
        return np.where(idx < 0, 1.0, law.values[np.clip(idx, 0, xs.size - 1)])

    emp_above = (n - np.searchsorted(s, s, side="right")) / n  # P(X > s_i)
    emp_at_least = (n - np.searchsorted(s, s, side="left")) / n  # left limit at s_i
    d = float(np.max(np.abs(law_at(s) - emp_above)))
    d = max(d, float(np.max(np.abs(law_before(s) - emp_at_least))))
    emp_grid = (n - np.searchsorted(s, xs, side="right")) / n
    emp_grid_before = (n - np.searchsorted(s, xs, side="left")) / n
    d = max(d, float(np.max(np.abs(law.values - emp_grid))))
    d = max(d, float(np.max(np.abs(law_before(xs) - emp_grid_before))))
    return float(d)
