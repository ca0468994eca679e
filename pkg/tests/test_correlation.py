import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import pearson_by_sums

from corrnet.correlation import (
    CorrelationMatrix,
    RollingSeries,
    correlation_matrix,
    correlation_variance,
    mean_correlation,
    pearson,
    rolling_apply,
)
from corrnet.errors import DataError
from corrnet.synthetic import one_factor_returns, two_regime_returns
from corrnet.timeseries import ReturnMatrix


def test_pearson_self():
    assert pearson([1, 2, 3], [1, 2, 3]) == 1.0


def test_pearson_anti():
    assert pearson([1, 2, 3], [3, 2, 1]) == -1.0


def test_pearson_hand_sums():
    expected = pearson_by_sums([1, 2, 3, 4], [1, 3, 2, 4])
    assert expected == pytest.approx(0.8, abs=1e-15)
    assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(expected, abs=1e-15)


def test_pearson_errors():
    with pytest.raises(DataError, match="variance"):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(DataError, match="mismatch"):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(DataError):
        pearson([1], [2])


def test_pearson_clamped():
    x = np.array([0.1, 0.2, 0.3]) * 1e-3 + 1
    assert -1.0 <= pearson(x, x) <= 1.0


def _mat(off):
    n = {1: 2, 3: 3}[len(off)]
    c = np.eye(n)
    c[np.triu_indices(n, 1)] = off
    c = c + np.triu(c, 1).T
    return CorrelationMatrix([f"s{k}" for k in range(n)], c)


def test_identical_series_exactly_one():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x = rng.normal(size=int(rng.integers(3, 50))) * rng.uniform(1e-3, 1)
        r = ReturnMatrix.from_array(np.vstack([x, x, rng.normal(size=x.size), -x]))
        c = correlation_matrix(r)
        assert c.values[0, 1] == 1.0 and c.values[0, 3] == -1.0
        assert pearson(x, x) == 1.0 and pearson(x, -x) == -1.0


def test_matrix_identical_and_negated_series():
    alt = np.array([1.0, -1.0] * 5)
    r = ReturnMatrix.from_array([alt, alt, -alt, np.roll(alt, 1) * 0.5 + alt * 0.1])
    c = correlation_matrix(r)
    assert c.values[0, 1] == 1.0
    assert c.values[0, 2] == -1.0
    assert c.window == (0, 10) and c.window_length == 10


def test_matrix_matches_pairwise_oracle():
    x = np.array([[1, 2, 0, 3], [2, 2, 1, 5], [0, -1, 4, 1]], dtype=float)
    c = correlation_matrix(ReturnMatrix.from_array(x))
    for i in range(3):
        for j in range(3):
            want = 1.0 if i == j else pearson_by_sums(list(x[i]), list(x[j]))
            assert c.values[i, j] == pytest.approx(want, abs=1e-14)


def test_matrix_invariants_on_random_data():
    c = correlation_matrix(one_factor_returns(12, 80, 0.4, seed=3))
    v = c.values
    assert np.array_equal(v, v.T)
    assert np.all(np.diag(v) == 1.0)
    assert np.all(np.abs(v) <= 1.0)


def test_matrix_window_slice():
    r = one_factor_returns(4, 50, 0.3, seed=1)
    c = correlation_matrix(r, (10, 30))
    np.testing.assert_allclose(c.values[1, 2], pearson(r.values[1, 10:30], r.values[2, 10:30]), atol=1e-14)


def test_matrix_constant_series_named():
    r = ReturnMatrix(["A", "B"], ["a", "b", "c", "d"], [[1, 2, 3, 4], [0, 0, 5, 1]])
    with pytest.raises(DataError, match="'B'"):
        correlation_matrix(r, (0, 2))


@pytest.mark.parametrize("window", [(0, 1), (-1, 3), (2, 2), (0, 9)])
def test_matrix_bad_window(window):
    with pytest.raises(DataError):
        correlation_matrix(one_factor_returns(2, 5, seed=0), window)


def test_mean_correlation_examples():
    c = _mat([0.5, 0.5, 0.5])
    assert mean_correlation(c) == 0.5
    assert mean_correlation(CorrelationMatrix(["a", "b", "c"], np.eye(3))) == 0.0
    assert mean_correlation(_mat([0.1, 0.2, 0.6])) == pytest.approx(0.3, abs=1e-15)


def test_correlation_variance_examples():
    assert correlation_variance(_mat([0.5, 0.5, 0.5])) == 0.0
    # mean 0.4, squared deviations 0.04, 0.04, 0.16
    assert correlation_variance(_mat([0.2, 0.2, 0.8])) == pytest.approx(0.08, abs=1e-15)
    assert correlation_variance(_mat([0.0])) == 0.0


def test_summaries_need_two_series():
    c = CorrelationMatrix(["a"], [[1.0]])
    with pytest.raises(DataError):
        mean_correlation(c)
    with pytest.raises(DataError):
        correlation_variance(c)


def test_correlation_matrix_rejects_invalid():
    with pytest.raises(DataError):
        CorrelationMatrix(["a", "b"], [[1, 0.2], [0.3, 1]])
    with pytest.raises(DataError):
        CorrelationMatrix(["a", "b"], [[1, 1.5], [1.5, 1]])
    with pytest.raises(DataError):
        CorrelationMatrix(["a", "b"], [[0.9, 0], [0, 1]])


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 10_000),
    st.integers(0, 5),
    st.floats(1e-3, 1e3),
    st.floats(-1e2, 1e2),
)
def test_affine_invariance(seed, which, a, b):
    r = one_factor_returns(6, 40, 0.5, seed=seed)
    v = r.values.copy()
    v[which] = a * v[which] + b
    c1 = correlation_matrix(r).values
    c2 = correlation_matrix(ReturnMatrix(r.symbols, r.dates, v)).values
    np.testing.assert_allclose(c1, c2, rtol=0, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_permutation_conjugates(seed):
    r = one_factor_returns(7, 30, 0.5, seed=seed)
    perm = np.random.default_rng(seed).permutation(7)
    c = correlation_matrix(r)
    cp = correlation_matrix(r.take([r.symbols[k] for k in perm]))
    np.testing.assert_allclose(cp.values, c.values[np.ix_(perm, perm)], rtol=0, atol=1e-14)
    assert cp.symbols == tuple(r.symbols[k] for k in perm)
    permuted = c.permuted(perm)
    assert mean_correlation(permuted) == mean_correlation(c)
    assert correlation_variance(permuted) == correlation_variance(c)


@pytest.mark.parametrize("seed", range(5))
def test_uncorrelated_mean_bound(seed):
    n = 20
    t = 100 * n
    c = correlation_matrix(one_factor_returns(n, t, 0.0, seed=seed))
    assert abs(mean_correlation(c)) < 3 / math.sqrt(t)


def test_rolling_full_window_single_value():
    r = one_factor_returns(5, 60, 0.5, seed=2)
    s = rolling_apply(r, 60, 1, mean_correlation)
    assert len(s) == 1 and s.dates == (r.dates[-1],)
    assert s.values[0] == mean_correlation(correlation_matrix(r))


def test_rolling_window_count():
    r = one_factor_returns(3, 40, 0.5, seed=2)
    s = rolling_apply(r, 30, 5, mean_correlation)
    assert len(s) == 3
    assert s.dates == (r.dates[29], r.dates[34], r.dates[39])


def test_rolling_two_regimes_rises():
    r = two_regime_returns(10, 800, 0.7, seed=4)
    s = rolling_apply(r, 200, 50, mean_correlation).as_array()
    assert abs(s[0]) < 0.05
    # second-regime population correlation is 0.7**2
    assert s[-1] > 0.35
    assert s[-1] - s[0] > 0.3


def test_rolling_threads_match_sequential():
    r = one_factor_returns(6, 120, 0.4, seed=9)
    a = rolling_apply(r, 50, 3, correlation_variance)
    b = rolling_apply(r, 50, 3, correlation_variance, workers=4)
    assert a == b


def test_rolling_errors():
    r = one_factor_returns(3, 20, seed=0)
    with pytest.raises(DataError, match="window exceeds"):
        rolling_apply(r, 21)
    with pytest.raises(DataError):
        rolling_apply(r, 10, 0)


def test_pearson_on_rolling_series():
    r = one_factor_returns(5, 300, 0.5, seed=1)
    a = rolling_apply(r, 100, 20, mean_correlation)
    b = rolling_apply(r, 100, 20, correlation_variance)
    assert pearson(a, b) == pytest.approx(pearson_by_sums(list(a.values), list(b.values)), abs=1e-12)
    shifted = RollingSeries(a.dates[1:], a.values[1:])
    with pytest.raises(DataError, match="different dates"):
        pearson(shifted, RollingSeries(b.dates[:-1], b.values[:-1]))
