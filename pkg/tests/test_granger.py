import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special, stats

from stockcast.errors import DegenerateTargetError, InsufficientDataError, ShapeError, SingularDesignError
from stockcast.granger import _lag_matrix, betainc_reg, f_sf, granger_grid, granger_p, ols_fit
from stockcast.metrics import Undefined
from stockcast.rng import SplitMix64


def lagged_pair(seed, n=300, coef=0.0, lag=1, noise=1.0):
    g = SplitMix64(seed)
    x = g.normal(n)
    y = noise * g.normal(n)
    if coef:
        y[lag:] += coef * x[:-lag]
    return x, y


# ------------------------------------------------------------ OLS


def test_exact_linear_response_has_zero_rss():
    x = np.linspace(-1, 1, 20)
    X = np.column_stack([np.ones(20), x])
    beta, rss = ols_fit(X, 3.0 - 2.0 * x)
    assert np.allclose(beta, [3.0, -2.0], atol=1e-12)
    assert rss == pytest.approx(0.0, abs=1e-10)


def test_intercept_only():
    beta, rss = ols_fit(np.ones((3, 1)), [1.0, 2.0, 3.0])
    assert beta[0] == pytest.approx(2.0, abs=1e-12)
    assert rss == pytest.approx(2.0, abs=1e-12)


@given(st.integers(0, 2**32))
def test_matches_normal_equations(seed):
    g = SplitMix64(seed)
    X = g.normal((50, 3))
    y = g.normal(50)
    beta, rss = ols_fit(X, y)
    ref = np.linalg.solve(X.T @ X, X.T @ y)
    assert np.allclose(beta, ref, atol=1e-8)
    assert rss >= 0
    assert rss == pytest.approx(float(np.sum((y - X @ ref) ** 2)), rel=1e-9)


def test_rank_deficient_design():
    x = np.arange(10.0)
    with pytest.raises(SingularDesignError):
        ols_fit(np.column_stack([x, 2 * x]), x)


def test_ols_shape_and_size_errors():
    with pytest.raises(ShapeError):
        ols_fit(np.ones((4, 2)), np.ones(3))
    with pytest.raises(InsufficientDataError):
        ols_fit(np.ones((2, 2)), np.ones(2))


# ------------------------------------------------------------ incomplete beta


def test_uniform_midpoint_exact():
    assert betainc_reg(0.5, 1.0, 1.0) == 0.5


def test_endpoints():
    assert betainc_reg(0.0, 2.0, 3.0) == 0.0
    assert betainc_reg(1.0, 2.0, 3.0) == 1.0


@given(
    st.floats(1e-6, 1 - 1e-6),
    st.floats(0.05, 200.0),
    st.floats(0.05, 200.0),
)
def test_symmetry_identity(x, a, b):
    assert abs(betainc_reg(x, a, b) + betainc_reg(1.0 - x, b, a) - 1.0) < 1e-12


@given(st.floats(1e-6, 1 - 1e-6), st.floats(0.1, 150.0), st.floats(0.1, 150.0))
def test_betainc_against_scipy(x, a, b):
    assert betainc_reg(x, a, b) == pytest.approx(float(special.betainc(a, b, x)), abs=1e-12)


def test_betainc_domain_errors():
    with pytest.raises(ValueError):
        betainc_reg(0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        betainc_reg(1.5, 1.0, 1.0)


@pytest.mark.parametrize("d1,d2", [(1, 10), (3, 50), (5, 280), (2, 7)])
def test_f_survival_against_scipy(d1, d2):
    for f in (0.01, 0.5, 1.0, 2.5, 10.0, 80.0):
        assert f_sf(f, d1, d2) == pytest.approx(float(stats.f.sf(f, d1, d2)), rel=1e-10, abs=1e-15)
    assert f_sf(0.0, d1, d2) == 1.0
    assert f_sf(math.inf, d1, d2) == 0.0


@given(st.floats(0.0, 50.0), st.floats(0.0, 50.0), st.integers(1, 6), st.integers(10, 300))
def test_p_monotone_in_f(f1, f2, d1, d2):
    lo, hi = sorted((f1, f2))
    assert f_sf(hi, d1, d2) <= f_sf(lo, d1, d2)


# ------------------------------------------------------------ Granger test


def test_planted_causality():
    x, y = lagged_pair(1, coef=0.9, noise=0.01)
    r = granger_p(x, y, 1)
    assert r.p_value < 0.001


def test_result_fields():
    x, y = lagged_pair(2, n=120)
    r = granger_p(x, y, 3)
    assert (r.lag, r.df_num, r.n_used) == (3, 3, 117)
    assert r.df_den == r.n_used - 2 * 3 - 1
    assert 0.0 <= r.p_value <= 1.0 and r.f_stat >= 0.0


@given(st.integers(0, 2**32), st.integers(1, 5))
def test_unrestricted_rss_not_larger(seed, lag):
    x, y = lagged_pair(seed, n=80)
    target = y[lag:]
    ones = np.ones((target.size, 1))
    restricted = np.hstack([ones, _lag_matrix(y, lag)])
    unrestricted = np.hstack([restricted, _lag_matrix(x, lag)])
    _, rss_r = ols_fit(restricted, target)
    _, rss_u = ols_fit(unrestricted, target)
    assert rss_u <= rss_r * (1 + 1e-12)
    assert granger_p(x, y, lag).f_stat >= 0.0


def test_null_rejection_rate_near_nominal():
    ps = np.array([granger_p(*lagged_pair(seed), 1).p_value for seed in range(200)])
    share = float(np.mean(ps > 0.05))
    assert 0.90 <= share <= 0.99


def test_constant_effect_is_degenerate():
    with pytest.raises(DegenerateTargetError):
        granger_p(np.arange(50.0), np.ones(50), 1)


def test_too_short_series():
    x, y = lagged_pair(3, n=20)
    with pytest.raises(InsufficientDataError):
        granger_p(x, y, 5)
    granger_p(x, y, 1)  # 20 - 1 - 3 = 16 denominator dof is enough


def test_granger_input_errors():
    with pytest.raises(ShapeError):
        granger_p(np.ones(30), np.ones(31), 1)
    with pytest.raises(ValueError):
        granger_p(np.ones(30), np.arange(30.0), 0)


# ------------------------------------------------------------ grid


def test_grid_constant_mood_gives_na_column():
    x, y = lagged_pair(4, n=150)
    grid = granger_grid({"calm": x, "flat": np.full(150, 0.3)}, y)
    assert all(isinstance(row[1], Undefined) for row in grid.cells)
    assert not any(isinstance(row[0], Undefined) for row in grid.cells)
    p = grid.p_values()
    assert p.shape == (5, 2) and np.all(np.isnan(p[:, 1]))
    assert all(line.endswith(",NA") for line in grid.to_csv().splitlines()[1:])


def test_grid_identical_copies_identical_columns():
    x, y = lagged_pair(5, n=150)
    grid = granger_grid({"a": x, "b": x.copy()}, y)
    p = grid.p_values()
    assert np.array_equal(p[:, 0], p[:, 1])


def test_grid_layout():
    x, y = lagged_pair(6, n=150)
    grid = granger_grid({"calm": x, "happy": y[::-1].copy()}, y, lags=(1, 2, 3))
    csv_lines = grid.to_csv("hdr").splitlines()
    assert csv_lines[0] == "# hdr"
    assert csv_lines[1] == "lag,calm,happy"
    assert [line.split(",")[0] for line in csv_lines[2:]] == ["1", "2", "3"]
    text = grid.to_text().splitlines()
    assert text[0] == "GRANGER TEST P-VALUES AT DIFFERENT LAGS"
    assert len(text) == 2 + 3


def test_true_lag_has_smallest_p_most_of_the_time():
    hits = 0
    trials = 100
    for seed in range(trials):
        x, y = lagged_pair(1000 + seed, coef=1.0, lag=3)
        p = granger_grid({"m": x}, y).p_values()[:, 0]
        order = np.argsort(p)
        hits += int(order[0] == 2 and p[order[0]] < p[order[1]])
    assert hits >= 0.9 * trials
