"""Synchronous min-sum message passing on a dense square cost matrix.

Every vertex of the complete bipartite graph sends one message per neighbor
and each update is a Jacobi sweep: the new message from vertex v to neighbor
w is the minimum over the other neighbors u of (weight(u, v) minus the
previous message from u to v).  Decisions pick, per vertex, the neighbor
minimizing (weight minus incoming message); the collection of decisions need
not form a matching.

Messages live in the extended reals with the conventions min over an empty
set = +inf and x - (+inf) = -inf; both are only reachable at n = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_cost_array(cost) -> np.ndarray:
    """Accept a CostMatrix or square array-like; return it as float64.

    Entries must be finite; the matrix must be square and non-empty.
    """
    entries = getattr(cost, "entries", cost)
    a = np.asarray(entries, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError("cost matrix must be non-empty")
    if not np.all(np.isfinite(a)):
        raise ValueError("cost matrix entries must be finite")
    return a


@dataclass(eq=False)
class MessageState:
    """Both message tables after k synchronous updates.

    ``row_to_col[i, j]`` is the message row i sends to column j and
    ``col_to_row[j, i]`` the message column j sends to row i.  At k = 0 all
    entries are exactly zero.  No operation mutates a state in place.
    """

    k: int
    row_to_col: np.ndarray
    col_to_row: np.ndarray

    @property
    def n(self) -> int:
        return self.row_to_col.shape[0]


@dataclass(eq=False)
class BipartiteDecision:
    """Per-vertex argmin choices for all 2n vertices.

    ``row_choice[i]`` is the column picked by row i, ``col_choice[j]`` the row
    picked by column j.  Collisions are allowed; see
    ``metrics.is_perfect_matching`` for the matching predicate.
    """

    row_choice: np.ndarray
    col_choice: np.ndarray

    @property
    def n(self) -> int:
        return self.row_choice.shape[0]


def init_messages(n: int) -> MessageState:
    """All-zero messages at step k = 0."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return MessageState(
        k=0,
        row_to_col=np.zeros((n, n)),
        col_to_row=np.zeros((n, n)),
    )


def _check_dims(state: MessageState, x: np.ndarray) -> None:
    if state.row_to_col.shape != x.shape or state.col_to_row.shape != x.shape:
        raise ValueError(
            f"message tables {state.row_to_col.shape} do not match cost {x.shape}"
        )


def _values_to_rows(state: MessageState, x: np.ndarray) -> np.ndarray:
    # V[i, j] = X[i, j] - <col j -> row i>
    return x - state.col_to_row.T


def _leave_one_out_min(values: np.ndarray, axis: int = 1) -> np.ndarray:
    """Leave-one-out minimum along `axis`, written lane-major.

    For axis=1: out[r, c] = min over c' != c of values[r, c'].  Only the
    smallest and second-smallest entries per lane are needed: every position
    gets the lane minimum except the argmin itself, which gets the runner-up.
    Produces exactly the same floats as a full scan, since the subtractions
    were already done in `values`.  A 1-by-1 input yields +inf (empty
    minimum).  Reductions run along the requested axis so no pass touches a
    transposed view.

    Consumes `values` as scratch (callers pass a per-step temporary).
    """
    first_idx = values.argmin(axis=axis)
    lanes = np.arange(values.shape[1 - axis])
    where = (lanes, first_idx) if axis == 1 else (first_idx, lanes)
    first = values[where]
    values[where] = np.inf
    second = values.min(axis=axis)
    out = values if axis == 1 else np.empty((values.shape[1], values.shape[0]))
    out[:] = first[:, None]
    out[lanes, first_idx] = second
    return out


def bp_step(state: MessageState, cost) -> MessageState:
    """One synchronous update of both message tables; the input is untouched."""
    x = as_cost_array(cost)
    _check_dims(state, x)
    # row direction reduces along rows of X - col_to_row^T; column direction
    # reduces along axis 0 of X - row_to_col and lands directly in the
    # (column, row) layout, keeping every pass cache-contiguous.
    return MessageState(
        k=state.k + 1,
        row_to_col=_leave_one_out_min(_values_to_rows(state, x), axis=1),
        col_to_row=_leave_one_out_min(x - state.row_to_col, axis=0),
    )


def bp_step_reference(state: MessageState, cost) -> MessageState:
    """Naive per-vertex full scan; the oracle bp_step must match bit for bit."""
    x = as_cost_array(cost)
    _check_dims(state, x)
    n = x.shape[0]
    new_rtc = np.full((n, n), np.inf)
    new_ctr = np.full((n, n), np.inf)
    for i in range(n):
        for j in range(n):
            best = np.inf
            for jp in range(n):
                if jp == j:
                    continue
                v = x[i, jp] - state.col_to_row[jp, i]
                if v < best:
                    best = v
            new_rtc[i, j] = best
    for j in range(n):
        for i in range(n):
            best = np.inf
            for ip in range(n):
                if ip == i:
                    continue
                v = x[ip, j] - state.row_to_col[ip, j]
                if v < best:
                    best = v
            new_ctr[j, i] = best
    return MessageState(k=state.k + 1, row_to_col=new_rtc, col_to_row=new_ctr)


def decide(state: MessageState, cost) -> BipartiteDecision:
    """Per-vertex argmin of (weight minus incoming message), lowest index on ties."""
    x = as_cost_array(cost)
    _check_dims(state, x)
    return BipartiteDecision(
        row_choice=_values_to_rows(state, x).argmin(axis=1),
        col_choice=(x - state.row_to_col).argmin(axis=0),
    )


@dataclass(eq=False)
class RunResult:
    state: MessageState
    decision: BipartiteDecision
    history: list[BipartiteDecision] | None


def run(cost, num_steps: int, record_history: bool = False) -> RunResult:
    """Apply num_steps updates from the zero initialization and decide.

    With record_history the decision after every step (including step 0) is
    kept, which the error-curve experiments consume.
    """
    if num_steps < 0:
        raise ValueError("num_steps must be nonnegative")
    x = as_cost_array(cost)
    state = init_messages(x.shape[0])
    history = [decide(state, x)] if record_history else None
    for _ in range(num_steps):
        state = bp_step(state, x)
        if record_history:
            history.append(decide(state, x))
    return RunResult(state=state, decision=decide(state, x), history=history)


def argmin_index_histogram(state: MessageState, cost) -> np.ndarray:
    """Distribution of decision ranks over all 2n vertices.

    The rank of a vertex's decision is the position (1 = nearest) of the
    chosen neighbor when the vertex's incident edges are sorted by weight.
    Returns integer counts indexed by rank, counts[0] unused; the counts sum
    to 2n.  Requires at least one update (at k = 0 every rank is 1).
    """
    if state.k < 1:
        raise ValueError("rank histogram needs k >= 1")
    x = as_cost_array(cost)
    _check_dims(state, x)
    n = x.shape[0]
    d = decide(state, x)
    rows = np.arange(n)

    def ranks(weights: np.ndarray, choice: np.ndarray) -> np.ndarray:
        order = np.argsort(weights, axis=1, kind="stable")
        pos = np.empty_like(order)
        pos[rows[:, None], order] = rows[None, :]
        return pos[rows, choice] + 1

    all_ranks = np.concatenate([ranks(x, d.row_choice), ranks(x.T, d.col_choice)])
    return np.bincount(all_ranks, minlength=n + 1)
