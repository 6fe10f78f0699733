"""Truncated Poisson weighted trees and the min-sum recursion on them.

The infinite object is a rooted tree in which every node's child-edge
weights are the ordered points of an independent unit-rate Poisson process.
The simulator truncates it to a full tree of a given depth and width B (the
minimum over infinitely many children is replaced by a minimum over the
first B, which carry the smallest weights; the exceedance diagnostic
reports how often the truncated minimum sits on the last retained child).

Up-messages follow the recursion

    msg(v, step s) = min over children c of ( weight(v, c) - msg(c, step s-1) ),

bottom-up and level-synchronous from i.i.d. step-0 values (constant 0 by
default).  A node at depth d has the subtree it needs for its step-s message
exactly when d + s <= depth, so with depth = k + 1 the messages entering the
root at step k are unaffected by the depth cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rng import check_seed, stream


@dataclass(eq=False)
class PwitTree:
    """Full width-B tree truncated at `depth`.

    level_weights[h] has shape (B**h, B): row v holds the ascending
    child-edge weights of the v-th depth-h node, the cumulative sums of
    unit-rate exponential spacings.  Arrays exist for h = 0 .. depth-1;
    depth-`depth` nodes are leaves.  Level h is drawn from the dedicated
    stream (seed, h) in child-major order (all first spacings, then all
    second spacings, ...), so trees of different depths share levels and a
    stream prefix yields the first spacing of every node.
    """

    depth: int
    width: int
    seed: int
    level_weights: list[np.ndarray]

    @property
    def num_nodes(self) -> int:
        return (self.width ** (self.depth + 1) - 1) // (self.width - 1)


def _level_weights(seed: int, width: int, h: int) -> np.ndarray:
    spacings = stream(seed, h).exponential(size=(width, width**h)).T
    return np.cumsum(spacings, axis=1)


def sample_pwit(depth: int, width: int, seed: int) -> PwitTree:
    """Deterministically sample a truncated tree; same seed, same tree."""
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if width < 2:
        raise ValueError(f"width must be >= 2, got {width}")
    seed = check_seed(seed)
    levels = [_level_weights(seed, width, h) for h in range(depth)]
    return PwitTree(depth=depth, width=width, seed=seed, level_weights=levels)


@dataclass(eq=False)
class TreeMessages:
    """Up-messages at one step for every non-root node.

    levels[h] (1 <= h <= depth) holds the messages of the depth-h nodes in
    node order; levels[0] is an empty placeholder since the root sends
    nothing upward.  Leaves have no children in the truncation and keep
    their step-0 value at every step, so only messages of nodes at depth
    <= depth - k match the untruncated width-B recursion.

    exceedance_rate is the fraction of evaluated minima attained at the last
    retained child, a visible proxy for the width-truncation error.
    """

    k: int
    levels: list[np.ndarray]
    exceedance_rate: float


def _initial_levels(tree: PwitTree, init: float,
                    init_draw: Callable[[np.random.Generator, int], np.ndarray] | None,
                    init_seed: int | None) -> list[np.ndarray]:
    levels: list[np.ndarray] = [np.empty(0)]
    for h in range(1, tree.depth + 1):
        size = tree.width**h
        if init_draw is None:
            levels.append(np.full(size, float(init)))
        else:
            levels.append(np.asarray(init_draw(stream(init_seed, 1, h), size), dtype=np.float64))
    return levels


def tree_bp(tree: PwitTree, k: int, init: float = 0.0,
            init_draw: Callable[[np.random.Generator, int], np.ndarray] | None = None,
            init_seed: int | None = None) -> TreeMessages:
    """Run k synchronous sweeps of the recursion from the given initialization.

    Requires k <= depth - 1 so the messages entering the root at step k are
    depth-exact.  `init` is the constant step-0 value; alternatively
    `init_draw(rng, size)` supplies i.i.d. step-0 values per level from the
    streams (init_seed, 1, level).
    """
    if not 0 <= k <= tree.depth - 1:
        raise ValueError(f"need 0 <= k <= depth-1 = {tree.depth - 1}, got k={k}")
    if init_draw is not None and init_seed is None:
        raise ValueError("init_draw needs an init_seed")
    B = tree.width
    levels = _initial_levels(tree, init, init_draw, init_seed)
    exceed = 0
    evaluated = 0
    for _ in range(k):
        new_levels = [np.empty(0)]
        for h in range(1, tree.depth):
            candidates = tree.level_weights[h] - levels[h + 1].reshape(-1, B)
            argmins = candidates.argmin(axis=1)
            new_levels.append(candidates[np.arange(candidates.shape[0]), argmins])
            exceed += int(np.count_nonzero(argmins == B - 1))
            evaluated += candidates.shape[0]
        new_levels.append(levels[tree.depth])  # leaves keep their init value
        levels = new_levels
    rate = exceed / evaluated if evaluated else 0.0
    return TreeMessages(k=k, levels=levels, exceedance_rate=rate)


def root_decision(tree: PwitTree, messages: TreeMessages) -> int:
    """Child index (0-based) minimizing (root edge weight minus incoming message)."""
    candidates = tree.level_weights[0][0] - messages.levels[1]
    return int(candidates.argmin())


@dataclass(frozen=True)
class RootSample:
    """One draw of the root's step-k environment.

    root_message is the step-k up-message of the root's first child (one
    unbiased sample of the step-k message law), decision the 0-based argmin
    child at the root.
    """

    root_message: float
    decision: int
    exceedance_rate: float


def sample_root(seed: int, depth: int, width: int, k: int, init: float = 0.0) -> RootSample:
    """Root message and decision at step k without materializing the tree.

    Computes only the diagonal the root needs (level h at step k+1-h) and
    samples each level lazily; at the deepest contributing level only the
    first spacing of each node can attain a constant-init minimum, so only
    the stream prefix is drawn.  Bit-identical to running tree_bp on
    sample_pwit with the same seed.  Constant initialization only.
    """
    if not 0 <= k <= depth - 1:
        raise ValueError(f"need 0 <= k <= depth-1 = {depth - 1}, got k={k}")
    if width < 2:
        raise ValueError(f"width must be >= 2, got {width}")
    seed = check_seed(seed)
    exceed = 0
    evaluated = 0
    if k == 0:
        msgs = np.full(width, float(init))
    else:
        msgs = stream(seed, k).exponential(size=width**k) - init
        for h in range(k - 1, 0, -1):
            candidates = _level_weights(seed, width, h) - msgs.reshape(-1, width)
            argmins = candidates.argmin(axis=1)
            msgs = candidates[np.arange(candidates.shape[0]), argmins]
            exceed += int(np.count_nonzero(argmins == width - 1))
            evaluated += candidates.shape[0]
    root_candidates = _level_weights(seed, width, 0)[0] - msgs
    rate = exceed / evaluated if evaluated else 0.0
    return RootSample(root_message=float(msgs[0]),
                      decision=int(root_candidates.argmin()),
                      exceedance_rate=rate)
