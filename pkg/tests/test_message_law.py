import numpy as np
import pytest

from bp_assign.message_law import (GRID_STEP, TailGrid, TailGridError, amplitude,
                                   apply_update, derivative_identity_check,
                                   estimate_shift, hat_derivative_tail_mass,
                                   hat_transform, iterate_update, logistic, shift,
                                   unit_step)

# shift constant of the zero-initialization law on the default grid, computed
# by estimate_shift and frozen as a regression value
UNIT_STEP_SHIFT = -0.59767


def glued_logistic() -> TailGrid:
    """Shifted logistic on the negative axis glued to the plain one; its hat
    transform takes exactly the values 1 (x < 0) and 0 (x >= 0)."""
    base = logistic()
    xs = base.grid()
    values = np.where(xs < 0, shift(base, 1.0).values, base.values)
    return TailGrid(lo=base.lo, hi=base.hi, step=base.step, values=values)


def test_logistic_symmetry():
    F = logistic()
    xs = F.grid()
    mid = (xs.size - 1) // 2
    assert F.values[mid] == pytest.approx(0.5)
    assert np.allclose(F.values + F.values[::-1], 1.0, atol=1e-12)


def test_logistic_is_fixed_point():
    F = logistic()
    assert apply_update(F).sup_distance(F) < 1e-3


def test_unit_step_update_is_exponential_tail():
    F1 = apply_update(unit_step())
    xs = F1.grid()
    expected = np.minimum(1.0, np.exp(-xs))
    assert np.max(np.abs(F1.values - expected)) < 2 * GRID_STEP


def test_update_is_anti_monotone():
    lower, upper = shift(logistic(), -1.0), shift(logistic(), 1.0)
    assert np.all(lower.values <= upper.values)
    assert np.all(apply_update(lower).values >= apply_update(upper).values)


def test_degenerate_laws_alternate():
    zeros = TailGrid(-40.0, 40.0, 0.01, np.zeros(8001))
    ones = apply_update(zeros)
    assert np.all(ones.values == 1.0)
    assert np.all(apply_update(ones).values == 0.0)


def test_shift_basics():
    F = logistic()
    assert shift(F, 0.0).sup_distance(F) < 1e-12
    shifted = shift(F, 2.0)
    assert shifted.value_at(2.0) == pytest.approx(0.5, abs=1e-9)


def test_shift_mass_escape_detected():
    with pytest.raises(TailGridError):
        shift(unit_step(), 45.0)


def test_shift_anticommutes_with_update_on_smooth_laws():
    F = iterate_update(unit_step(), 2)
    for t in (-5.0, -2.5, 1.3, 5.0):
        lhs = apply_update(shift(F, t))
        rhs = shift(apply_update(F), -t)
        assert lhs.sup_distance(rhs) < 1e-3


def test_hat_of_logistic_vanishes():
    _, hat = hat_transform(logistic())
    assert np.max(np.abs(hat)) < 1e-6
    low, high = amplitude(logistic())
    assert abs(low) < 1e-6 and abs(high) < 1e-6


def test_hat_of_shifted_logistic_is_constant_shift():
    _, hat = hat_transform(shift(logistic(), 2.0))
    assert np.max(np.abs(hat - 2.0)) < 1e-3


def test_hat_of_iterated_unit_step_is_bounded():
    xs, hat = hat_transform(iterate_update(unit_step(), 4))
    assert np.all(np.isfinite(hat))
    assert xs[0] == pytest.approx(-10.0) and xs[-1] == pytest.approx(10.0)


def test_hat_rejects_fully_saturated_window():
    with pytest.raises(TailGridError):
        hat_transform(unit_step(), window=(1.0, 5.0))


def test_glued_function_hat_range():
    low, high = amplitude(glued_logistic())
    assert low == pytest.approx(0.0, abs=1e-9)
    assert high == pytest.approx(1.0, abs=1e-9)


def test_double_step_contraction_is_strict():
    g2 = iterate_update(glued_logistic(), 2)
    low, high = amplitude(g2)
    assert low > 1e-3
    assert high < 1.0 - 1e-3


def test_amplitude_sequence_is_monotone():
    for start in (unit_step(), glued_logistic()):
        G = iterate_update(start, 4)
        low, high = amplitude(G)
        for _ in range(8):
            G = iterate_update(G, 2)
            new_low, new_high = amplitude(G)
            assert new_low >= low - 2 * GRID_STEP
            assert new_high <= high + 2 * GRID_STEP
            low, high = new_low, new_high


def test_estimate_shift_logistic():
    est = estimate_shift(logistic())
    assert abs(est.shift) < 1e-5
    assert est.residual < 1e-5


def test_estimate_shift_logistic_refined_grid():
    # the residual floor is quadrature wobble, O(step^2): refining the grid
    # drives both the shift and the residual below 1e-6
    est = estimate_shift(logistic(step=0.0025))
    assert abs(est.shift) < 1e-6
    assert est.residual < 1e-6


@pytest.mark.parametrize("t", [2.0, -1.5])
def test_estimate_shift_recovers_explicit_shifts(t):
    est = estimate_shift(shift(logistic(), t))
    assert est.shift == pytest.approx(t, abs=1e-3)


def test_estimate_shift_unit_step_regression():
    est = estimate_shift(unit_step())
    assert est.residual < 1e-3
    assert est.shift == pytest.approx(UNIT_STEP_SHIFT, abs=5e-4)


def test_alternating_convergence_to_shifted_logistics():
    target_even = shift(logistic(), UNIT_STEP_SHIFT)
    target_odd = shift(logistic(), -UNIT_STEP_SHIFT)
    G = iterate_update(unit_step(), 20)
    distances = []
    for _ in range(3):
        distances.append(G.sup_distance(target_even))
        assert apply_update(G).sup_distance(target_odd) < 1e-2
        G = iterate_update(G, 20)
    assert distances[0] < 1e-2
    assert distances == sorted(distances, reverse=True)  # sup distance shrinks


@pytest.mark.parametrize("start", ["logistic", "unit_step"])
@pytest.mark.parametrize("k", [2, 3, 5])
def test_derivative_identities_match_finite_differences(start, k):
    F = logistic() if start == "logistic" else unit_step()
    assert derivative_identity_check(F, k) < 5 * GRID_STEP


def test_derivative_deviation_shrinks_with_grid():
    coarse = derivative_identity_check(unit_step(), 2)
    fine = derivative_identity_check(unit_step(step=0.005), 2)
    assert fine <= 0.75 * coarse


def test_derivative_check_needs_two_steps():
    with pytest.raises(ValueError):
        derivative_identity_check(logistic(), 1)


def test_hat_derivative_tail_mass_vanishes():
    masses = []
    for m in (10.0, 15.0, 20.0, 25.0):
        masses.append(max(hat_derivative_tail_mass(unit_step(), k, m)
                          for k in range(3, 61)))
    assert all(a >= b for a, b in zip(masses, masses[1:]))  # decreasing in m
    assert masses[2] < 1e-3  # below threshold by m = 20


def test_grid_validation():
    with pytest.raises(TailGridError):
        TailGrid(-3.0, 4.0, 0.01, np.zeros(701))  # asymmetric
    with pytest.raises(TailGridError):
        TailGrid(-1.0, 1.0, 0.4, np.zeros(6))  # no zero point
    with pytest.raises(TailGridError):
        TailGrid(-40.0, 40.0, 0.01, np.zeros(17))  # wrong sample count
    increasing = np.linspace(0.0, 1.0, 8001)
    with pytest.raises(TailGridError):
        TailGrid(-40.0, 40.0, 0.01, increasing).validate()
    half = TailGrid(-40.0, 40.0, 0.01, np.full(8001, 0.5))
    with pytest.raises(TailGridError):
        half.validate()  # mass escapes on both edges


def test_iterate_update_edge_cases():
    F = logistic()
    assert iterate_update(F, 0) is F
    with pytest.raises(ValueError):
        iterate_update(F, -1)
