"""Discretized dynamics of the min-sum update on message laws.

A message law is stored through its tail distribution function
F(x) = P(X > x), sampled on a uniform symmetric grid.  One synchronous
min-sum step on a tree whose child-edge weights form a unit-rate Poisson
process maps the incoming law F to

    update(F)(x) = exp( - integral of F over (-x, +infinity) ),

computed here with trapezoid quadrature plus an exponential model for the
mass beyond the right grid edge.  The update is order-reversing: F <= G
pointwise implies update(F) >= update(G).  Its unique fixed law is the
logistic tail x -> 1/(1 + e^x), and shifting the input by t shifts the
output by -t.  The hat transform x + ln(F(x)/(1-F(x))) measures the local
shift of F against the logistic tail: it is identically t exactly when F is
the logistic tail shifted by t, and double steps contract its range toward a
constant, the shift constant of the input law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

GRID_LO = -40.0
GRID_HI = 40.0
GRID_STEP = 0.01
HAT_WINDOW = (-10.0, 10.0)

_EDGE_TOL = 1e-6
_MONOTONE_SLACK = 1e-12


class TailGridError(ValueError):
    """A tail function left the grid or broke a tail-function invariant."""


@dataclass(eq=False)
class TailGrid:
    """A tail distribution function sampled on a uniform symmetric grid.

    values[m] approximates F(lo + m*step).  Valid grids are non-increasing,
    confined to [0, 1], and essentially exhaust the mass: values[0] must
    reach 1 and values[-1] must reach 0, both within 1e-6.  The two
    degenerate constants (all-zero, all-one) are representable as well; the
    update short-circuits on them.
    """

    lo: float
    hi: float
    step: float
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.step <= 0:
            raise TailGridError("grid step must be positive")
        if self.lo != -self.hi:
            raise TailGridError("grid must be symmetric around zero")
        npoints = round((self.hi - self.lo) / self.step) + 1
        if abs((self.hi - self.lo) / self.step - (npoints - 1)) > 1e-9:
            raise TailGridError("grid range must be an integer number of steps")
        if (npoints - 1) % 2:
            raise TailGridError("grid must contain zero: need an even number of steps")
        if self.values.shape != (npoints,):
            raise TailGridError(
                f"expected {npoints} samples for this grid, got {self.values.shape}"
            )

    def grid(self) -> np.ndarray:
        """Grid abscissae; x[m] and -x[m] are both exact grid points."""
        n = self.values.size
        return (np.arange(n) - (n - 1) // 2) * self.step

    def validate(self) -> None:
        v = self.values
        if np.any(v < -_MONOTONE_SLACK) or np.any(v > 1 + _MONOTONE_SLACK):
            raise TailGridError("tail values must lie in [0, 1]")
        if np.any(np.diff(v) > _MONOTONE_SLACK):
            raise TailGridError("tail values must be non-increasing")
        if v[0] < 1 - _EDGE_TOL:
            raise TailGridError(f"mass escaped on the left: F(lo) = {v[0]}")
        if v[-1] > _EDGE_TOL:
            raise TailGridError(f"mass escaped on the right: F(hi) = {v[-1]}")

    def value_at(self, x) -> np.ndarray:
        """Linear interpolation, extended by the edge values outside the grid."""
        return np.interp(x, self.grid(), self.values,
                         left=self.values[0], right=self.values[-1])

    def sup_distance(self, other: "TailGrid") -> float:
        if self.values.shape != other.values.shape or self.step != other.step:
            raise TailGridError("sup distance needs identical grids")
        return float(np.max(np.abs(self.values - other.values)))


def _make(values, lo=GRID_LO, hi=GRID_HI, step=GRID_STEP) -> TailGrid:
    return TailGrid(lo=lo, hi=hi, step=step, values=values)


def _grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    n = round((hi - lo) / step) + 1
    return (np.arange(n) - (n - 1) // 2) * step


def logistic(lo: float = GRID_LO, hi: float = GRID_HI, step: float = GRID_STEP) -> TailGrid:
    """The logistic tail 1/(1+e^x), the unique fixed law of the update."""
    return _make(expit(-_grid_points(lo, hi, step)), lo, hi, step)


def unit_step(lo: float = GRID_LO, hi: float = GRID_HI, step: float = GRID_STEP) -> TailGrid:
    """Tail of the point mass at zero: the law of all-zero initial messages."""
    return _make((_grid_points(lo, hi, step) < 0).astype(np.float64), lo, hi, step)


def shift(F: TailGrid, t: float) -> TailGrid:
    """The shifted tail x -> F(x - t); raises if mass escapes the grid."""
    xs = F.grid()
    out = _make(np.interp(xs - t, xs, F.values, left=F.values[0], right=F.values[-1]),
                F.lo, F.hi, F.step)
    out.validate()
    return out


def _right_tail_mass(values: np.ndarray, step: float) -> float:
    """Mass of F beyond the right grid edge under an exponential decay model.

    The decay rate is fitted from the last two cells; iterated laws decay at
    unit rate eventually, so a degenerate ratio falls back to unit mean.
    """
    last, prev = values[-1], values[-2]
    if last <= 0.0:
        return 0.0
    if prev > last:
        rate = np.log(prev / last) / step
        return float(last / rate)
    return float(last)


def _update_integral(values: np.ndarray, step: float) -> np.ndarray:
    """integral[m] = mass of F over (x_m, hi] plus the modeled right tail."""
    increments = 0.5 * step * (values[1:] + values[:-1])
    integral = np.empty_like(values)
    integral[-1] = 0.0
    integral[:-1] = np.cumsum(increments[::-1])[::-1]
    integral += _right_tail_mass(values, step)
    return integral


def apply_update(F: TailGrid) -> TailGrid:
    """One min-sum step in distribution.

    Trapezoid quadrature keeps the running integral exactly monotone, so the
    output is exactly non-increasing and confined to (0, 1]; the output is
    validated against the grid-exhaustion invariants before it is returned.
    """
    v = F.values
    if np.all(v == 0.0):
        return _make(np.ones_like(v), F.lo, F.hi, F.step)
    if np.all(v == 1.0):
        return _make(np.zeros_like(v), F.lo, F.hi, F.step)
    F.validate()
    # update(F)(x) needs the integral from -x; the grid is symmetric so -x is
    # the mirror grid point.
    out = _make(np.exp(-_update_integral(v, F.step)[::-1]), F.lo, F.hi, F.step)
    out.validate()
    return out


def iterate_update(F: TailGrid, k: int) -> TailGrid:
    """k-fold application of the update; k = 0 returns the input."""
    if k < 0:
        raise ValueError("iteration count must be nonnegative")
    for _ in range(k):
        F = apply_update(F)
    return F


def hat_transform(F: TailGrid, window: tuple[float, float] = HAT_WINDOW):
    """Local shift of F against the logistic tail: x + ln(F(x)/(1-F(x))).

    Evaluated on the grid points inside `window` where F is strictly inside
    (0, 1); saturated points are excluded.  Returns (xs, values).
    """
    xs = F.grid()
    v = F.values
    mask = (xs >= window[0]) & (xs <= window[1]) & (v > 0.0) & (v < 1.0)
    if not mask.any():
        raise TailGridError("tail function saturates on the whole window")
    return xs[mask], xs[mask] + np.log(v[mask]) - np.log1p(-v[mask])


def amplitude(F: TailGrid, window: tuple[float, float] = HAT_WINDOW) -> tuple[float, float]:
    """(inf, sup) of the hat transform over the window."""
    _, hat = hat_transform(F, window)
    return float(hat.min()), float(hat.max())


@dataclass(frozen=True)
class ShiftEstimate:
    """Estimated shift constant of a law under double steps.

    The residual is half the remaining hat-transform oscillation; the hat of
    an exactly shifted logistic tail is constant, so residual 0 means the
    iterates have collapsed onto one.
    """

    shift: float
    double_steps: int
    residual: float


def estimate_shift(F: TailGrid, double_steps: int = 30,
                   window: tuple[float, float] = HAT_WINDOW) -> ShiftEstimate:
    """Shift constant via the hat midpoint after `double_steps` double updates.

    Double steps drive the hat transform of any non-degenerate law uniformly
    to a constant; the midpoint of its range is a robust read of that
    constant and (sup - inf)/2 certifies the convergence actually happened.
    """
    G = iterate_update(F, 2 * double_steps)
    low, high = amplitude(G, window)
    return ShiftEstimate(shift=0.5 * (low + high), double_steps=double_steps,
                         residual=0.5 * (high - low))


def _window_slice(xs: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    return (xs >= window[0]) & (xs <= window[1])


def derivative_identity_check(F: TailGrid, k: int,
                              window: tuple[float, float] = HAT_WINDOW) -> float:
    """Max deviation of the analytic derivatives from centered differences.

    After k >= 2 steps the iterated law G = update^k(F) is differentiable
    with G'(x) = -G(x) * H(-x), where H = update^(k-1)(F), and its hat
    transform has derivative (1 - G(x) - H(-x)) / (1 - G(x)).  Both formulas
    are compared against centered finite differences over the window; the
    larger of the two max deviations is returned.
    """
    if k < 2:
        raise ValueError("the derivative identities need k >= 2")
    H = iterate_update(F, k - 1)
    G = apply_update(H)
    xs = G.grid()
    h = G.step
    g = G.values
    h_reflected = H.values[::-1]  # H(-x) on the symmetric grid

    analytic = -g * h_reflected
    centered = (g[2:] - g[:-2]) / (2 * h)
    inner = _window_slice(xs[1:-1], window)
    dev_plain = float(np.max(np.abs(analytic[1:-1][inner] - centered[inner])))

    # hat side, on a margin-widened window so the centered stencil stays valid
    wide = (window[0] - 2 * h, window[1] + 2 * h)
    ok = _window_slice(xs, wide) & (g > 0.0) & (g < 1.0)
    if not ok[_window_slice(xs, wide)].all():
        raise TailGridError("iterated law saturates inside the hat window")
    idx = np.where(ok)[0]
    hat = xs[idx] + np.log(g[idx]) - np.log1p(-g[idx])
    analytic_hat = (1.0 - g[idx] - h_reflected[idx]) / (1.0 - g[idx])
    centered_hat = (hat[2:] - hat[:-2]) / (2 * h)
    inner_hat = _window_slice(xs[idx][1:-1], window)
    dev_hat = float(np.max(np.abs(analytic_hat[1:-1][inner_hat] - centered_hat[inner_hat])))
    return max(dev_plain, dev_hat)


def hat_derivative_tail_mass(F: TailGrid, k: int, m: float, cap: float = 36.0) -> float:
    """Integral of |d/dx hat(update^k(F))| over m < |x| <= cap.

    Uses the analytic derivative formula (k >= 2), with the complement
    1 - update^k(F) evaluated as -expm1(-integral) so it keeps full relative
    precision where the law saturates; the true integrand decays like
    exp(-|x|), so the mass beyond the cap is negligible at the tolerances
    used here.
    """
    if k < 2:
        raise ValueError("needs k >= 2")
    if not 0 <= m < cap:
        raise ValueError("need 0 <= m < cap")
    H = iterate_update(F, k - 1)
    xs = H.grid()
    complement = -np.expm1(-_update_integral(H.values, H.step)[::-1])  # 1 - update(H)(x)
    h_reflected = H.values[::-1]
    valid = complement > 0.0
    integrand = np.zeros_like(complement)
    integrand[valid] = np.abs(1.0 - h_reflected[valid] / complement[valid])
    total = 0.0
    for side in ((xs > m) & (xs <= cap), (xs < -m) & (xs >= -cap)):
        if np.count_nonzero(side) >= 2:
            total += float(np.trapezoid(integrand[side], xs[side]))
    return total
