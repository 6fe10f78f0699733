"""Deterministic random-stream derivation.

All randomness in the package flows through numpy's ``SeedSequence``/PCG64
pair, which is splittable: a stream is identified by a user seed plus an
optional tuple of small non-negative integer tags, and identical identifiers
yield identical draws on every run, platform and thread count.

Tag conventions (fixed so streams never collide across modules):

* cost-matrix generation uses the bare seed, no tags;
* tree sampling uses one tag, the level index ``(seed, level)``;
* two-tag streams ``(seed, purpose, index)`` cover the rest: purpose 0 is
  experiment-internal choices, purpose 1 is random tree-message
  initialization per level.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    """Validate and return a user seed (a non-negative 64-bit integer)."""
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def stream(seed: int, *tags: int) -> np.random.Generator:
    """Return a fresh PCG64 generator for the stream ``(seed, *tags)``."""
    seed = check_seed(seed)
    entropy = (seed, *(int(t) for t in tags)) if tags else seed
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
