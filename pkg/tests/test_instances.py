import json

import numpy as np
import pytest

from bp_assign.exact import solve_exact
from bp_assign.instances import (CostMatrix, exponential, generate, load_matrix,
                                 rescale, save_matrix, uniform01)


def test_uniform_small_instance_support_and_distinct():
    m = generate(2, uniform01(), seed=42)
    assert m.entries.shape == (2, 2)
    assert np.all((m.entries >= 0) & (m.entries <= 1))
    assert np.unique(m.entries).size == 4
    assert not m.rescaled


def test_exponential_sample_mean_matches_law():
    m = generate(300, exponential(1.0), seed=7)
    assert abs(m.entries.mean() - 1.0) < 0.05


def test_generation_is_deterministic():
    dist = exponential(2.0)
    a = generate(50, dist, seed=123)
    b = generate(50, dist, seed=123)
    assert np.array_equal(a.entries, b.entries)
    c = generate(50, dist, seed=124)
    assert not np.array_equal(a.entries, c.entries)


def test_zero_size_rejected():
    with pytest.raises(ValueError):
        generate(0, uniform01(), seed=1)


def test_bad_seed_rejected():
    with pytest.raises(ValueError):
        generate(3, uniform01(), seed=-1)
    with pytest.raises(TypeError):
        generate(3, uniform01(), seed=1.5)


def test_rescale_multiplies_by_n_times_density():
    m = CostMatrix(n=2, entries=np.array([[0.3, 0.7], [0.2, 0.9]]), seed=0, rescaled=False)
    r = rescale(m, exponential(1.0))
    assert r.entries[0, 0] == pytest.approx(0.6)
    assert r.rescaled

    m10 = CostMatrix(n=10, entries=np.full((10, 10), 0.05), seed=0, rescaled=False)
    r10 = rescale(m10, exponential(2.0))
    assert r10.entries[0, 0] == pytest.approx(1.0)


def test_double_rescale_rejected():
    m = generate(4, exponential(1.0), seed=3)
    r = rescale(m, exponential(1.0))
    with pytest.raises(ValueError):
        rescale(r, exponential(1.0))


def test_rescale_preserves_row_argmin_order():
    m = generate(20, exponential(1.0), seed=11)
    r = rescale(m, exponential(1.0))
    assert np.array_equal(m.entries.argmin(axis=1), r.entries.argmin(axis=1))
    assert np.array_equal(np.argsort(m.entries, axis=1), np.argsort(r.entries, axis=1))


def test_rescale_preserves_optimal_assignment():
    dist = exponential(3.0)
    for seed in range(5):
        m = generate(12, dist, seed)
        r = rescale(m, dist)
        assert np.array_equal(solve_exact(m).row_to_col, solve_exact(r).row_to_col)


def test_exponential_tail_probability():
    rate = 2.0
    m = generate(400, exponential(rate), seed=9)  # 160000 draws
    draws = m.entries.ravel()
    p_hat = np.mean(draws > 3.0 / rate)
    p = np.exp(-3.0)
    se = np.sqrt(p * (1 - p) / draws.size)
    assert abs(p_hat - p) < 3 * se


def test_distribution_parameter_validation():
    with pytest.raises(ValueError):
        exponential(0.0)
    with pytest.raises(ValueError):
        uniform01(tail_rate=-1.0)
    with pytest.raises(ValueError):
        generate(2, uniform01(), seed=2**64)


def test_save_load_roundtrip(tmp_path):
    dist = exponential(2.5)
    m = rescale(generate(6, dist, seed=77), dist)
    csv_path = tmp_path / "matrix.csv"
    sidecar = save_matrix(m, dist, csv_path)
    header = json.loads(sidecar.read_text())
    assert header == {"n": 6, "kind": "exponential", "rate": 2.5, "seed": 77, "rescaled": True}
    loaded, loaded_dist = load_matrix(csv_path)
    assert np.array_equal(loaded.entries, m.entries)
    assert loaded.rescaled and loaded.seed == 77
    assert loaded_dist.kind == "exponential" and loaded_dist.rate == 2.5


def test_save_load_roundtrip_uniform(tmp_path):
    dist = uniform01()
    m = generate(3, dist, seed=5)
    csv_path = tmp_path / "matrix.csv"
    header = json.loads(save_matrix(m, dist, csv_path).read_text())
    assert header["kind"] == "uniform01" and header["rate"] is None
    loaded, loaded_dist = load_matrix(csv_path)
    assert np.array_equal(loaded.entries, m.entries)
    assert loaded_dist.kind == "uniform01"
