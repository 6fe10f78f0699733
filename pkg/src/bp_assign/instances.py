"""Random cost-matrix instances for the assignment problem.

Instances are dense n-by-n matrices of i.i.d. nonnegative weights drawn from
a distribution that is continuous with a positive density at zero and a
light (exponentially bounded) upper tail.  Two such families ship here:
uniform on [0, 1] and exponential with arbitrary rate.  Users supplying a
custom family must provide its density at zero and a valid tail rate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rng import check_seed, stream

_REDRAW_LIMIT = 16


@dataclass(frozen=True)
class WeightDistribution:
    """Edge-weight law together with the two constants the theory needs.

    ``density_at_zero`` is the derivative of the CDF at 0+ (1 for uniform01,
    the rate for exponential); ``tail_rate`` is any positive beta with
    P(X > t) = O(exp(-beta t)).  The tail rate is recorded as metadata only
    and is never consumed numerically.
    """

    kind: str
    rate: float | None
    density_at_zero: float
    tail_rate: float

    def __post_init__(self) -> None:
        if self.kind not in ("uniform01", "exponential"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "exponential":
            if self.rate is None or self.rate <= 0:
                raise ValueError("exponential needs a positive rate")
            if self.density_at_zero != self.rate:
                raise ValueError("density at zero of exponential(rate) is the rate")
        else:
            if self.rate is not None:
                raise ValueError("uniform01 takes no rate")
            if self.density_at_zero != 1.0:
                raise ValueError("density at zero of uniform01 is 1")
        if self.tail_rate <= 0:
            raise ValueError("tail_rate must be positive")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "uniform01":
            return rng.random(size)
        return rng.exponential(scale=1.0 / self.rate, size=size)


def uniform01(tail_rate: float = 1.0) -> WeightDistribution:
    """Uniform law on [0, 1]; any positive tail rate is valid (bounded support)."""
    return WeightDistribution("uniform01", None, 1.0, tail_rate)


def exponential(rate: float = 1.0) -> WeightDistribution:
    """Exponential law with the given rate."""
    return WeightDistribution("exponential", float(rate), float(rate), float(rate))


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Dense nonnegative cost matrix with its generation metadata.

    ``rescaled`` is True iff the entries were multiplied by n times the
    density at zero, the normalization under which message statistics admit
    an n-independent limit.  All n^2 entries are pairwise distinct on
    generated instances, which makes the optimal assignment unique.
    """

    n: int
    entries: np.ndarray
    seed: int
    rescaled: bool


def generate(n: int, dist: WeightDistribution, seed: int) -> CostMatrix:
    """Draw an n-by-n matrix of i.i.d. weights from a deterministic stream.

    The same (n, dist, seed) triple always yields the bit-identical matrix.
    In the (measure-zero) event of a floating-point collision between two
    entries, the full matrix is redrawn from seed+1, seed+2, ...
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"matrix size must be a positive integer, got {n}")
    seed = check_seed(seed)
    for attempt in range(_REDRAW_LIMIT):
        rng = stream((seed + attempt) % (2**64))
        entries = dist.sample(rng, (n, n))
        if np.unique(entries).size == n * n:
            return CostMatrix(n=int(n), entries=entries, seed=seed, rescaled=False)
    raise RuntimeError(f"could not draw {n * n} distinct entries after {_REDRAW_LIMIT} attempts")


def rescale(m: CostMatrix, dist: WeightDistribution) -> CostMatrix:
    """Multiply every entry by n * density_at_zero; refuses to run twice.

    Positive scaling leaves every argmin (per-vertex decisions and the
    optimal assignment) unchanged.
    """
    if m.rescaled:
        raise ValueError("matrix is already rescaled")
    factor = m.n * dist.density_at_zero
    return CostMatrix(n=m.n, entries=m.entries * factor, seed=m.seed, rescaled=True)


def save_matrix(m: CostMatrix, dist: WeightDistribution, csv_path: str | Path) -> Path:
    """Write the entries as CSV plus a sidecar JSON header; returns the sidecar path.

    The sidecar holds {n, kind, rate, seed, rescaled} next to the CSV,
    with the same stem and a .json suffix.
    """
    csv_path = Path(csv_path)
    np.savetxt(csv_path, m.entries, fmt="%.17g", delimiter=",")
    sidecar = csv_path.with_suffix(".json")
    header = {
        "n": m.n,
        "kind": dist.kind,
        "rate": dist.rate,
        "seed": m.seed,
        "rescaled": m.rescaled,
    }
    sidecar.write_text(json.dumps(header, sort_keys=True) + "\n")
    return sidecar


def load_matrix(csv_path: str | Path) -> tuple[CostMatrix, WeightDistribution]:
    """Inverse of save_matrix; %.17g formatting makes the round trip exact."""
    csv_path = Path(csv_path)
    header = json.loads(csv_path.with_suffix(".json").read_text())
    entries = np.loadtxt(csv_path, delimiter=",", ndmin=2)
    n = int(header["n"])
    if entries.shape != (n, n):
        raise ValueError(f"matrix file is {entries.shape}, header says n={n}")
    if header["kind"] == "exponential":
        dist = exponential(float(header["rate"]))
    else:
        dist = uniform01()
    cost = CostMatrix(n=n, entries=entries, seed=int(header["seed"]),
                      rescaled=bool(header["rescaled"]))
    return cost, dist
