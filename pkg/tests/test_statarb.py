"""Contrarian strategy: weights, profit identities, closed forms, backtest."""

import math

import numpy as np
import pytest

from stochlab.rng import RandomSource, split_stream
from stochlab.statarb import (
    LeadLagModel,
    ReturnPanel,
    UndefinedSharpeError,
    backtest,
    batch_means_se,
    contrarian_weights,
    expected_profit_general,
    expected_profit_leadlag,
    gross_investment,
    leadlag_autocov,
    leverage_ratio,
    leveraged_return,
    perf_stats,
    profit,
    read_backtest_csv,
    read_panel_csv,
    simulate_deterministic_price,
    simulate_leadlag,
    unleveraged_return,
    write_backtest_csv,
    write_panel_csv,
)


def test_deterministic_price_path():
    assert np.all(simulate_deterministic_price(100.0, np.zeros(5)) == 100.0)
    assert np.array_equal(simulate_deterministic_price(0.0, [1.0, 1.0, 1.0]),
                          [1.0, 2.0, 3.0])
    inc = RandomSource(1).normals(50)
    path = simulate_deterministic_price(7.0, inc)
    rebuilt = np.diff(np.concatenate(([7.0], path)))
    assert np.allclose(rebuilt, inc, atol=1e-12)


def test_leadlag_zero_noise_is_constant_panel():
    model = LeadLagModel(np.array([0.01, 0.02, 0.03]), np.ones(3),
                         sigma_lambda=0.0, sigma_eps=0.0)
    panel = simulate_leadlag(model, 20, RandomSource(0))
    for i, mu in enumerate((0.01, 0.02, 0.03)):
        assert np.all(panel.returns[i] == mu)


def test_leadlag_moments_at_scale():
    # row means and the lag-1 cross-covariance against their theory values,
    # each within 3 standard errors at T = 1e6
    T = 1_000_000
    mu = np.array([0.0, 0.001, -0.001, 0.002, 0.0005])
    beta = np.array([1.0, 0.8, 1.2, 0.6, 1.4])
    model = LeadLagModel(mu, beta, sigma_lambda=1.0, sigma_eps=1.0)
    panel = simulate_leadlag(model, T, RandomSource(100))
    r = panel.returns
    for i in range(5):
        row_var = beta[i] ** 2 + 1.0
        se = math.sqrt(row_var / T)
        assert abs(r[i].mean() - mu[i]) < 3 * se
    # cov(R_{i,t-1}, R_{i+1,t}) = beta_i beta_{i+1} sigma_lambda^2
    for i in range(4):
        x = r[i, :-1] - mu[i]
        y = r[i + 1, 1:] - mu[i + 1]
        sample = float((x * y).mean())
        want = beta[i] * beta[i + 1]
        se = float((x * y).std(ddof=1)) / math.sqrt(T - 1)
        assert abs(sample - want) < 3 * se


def test_leadlag_autocov_structure():
    model = LeadLagModel(np.zeros(3), np.ones(3), sigma_lambda=1.0)
    g1 = leadlag_autocov(model, 1)
    want = np.zeros((3, 3))
    want[0, 1] = want[1, 2] = 1.0
    assert np.array_equal(g1, want)
    assert np.array_equal(leadlag_autocov(model, 3), np.zeros((3, 3)))
    assert np.array_equal(leadlag_autocov(model, 7), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        leadlag_autocov(model, 0)

    scaled = LeadLagModel(np.zeros(4), np.array([1.0, 2.0, 3.0, 4.0]),
                          sigma_lambda=0.5)
    g2 = leadlag_autocov(scaled, 2)
    assert g2[0, 2] == 1.0 * 3.0 * 0.25
    assert g2[1, 3] == 2.0 * 4.0 * 0.25
    assert np.count_nonzero(g2) == 2


def test_contrarian_weights_examples():
    panel = ReturnPanel(np.array([[0.01, 0.05], [-0.01, 0.05]]))
    w = contrarian_weights(panel, t=1, k=1)
    assert np.allclose(w, [-0.005, 0.005], atol=1e-18)
    # identical cross-section => zero weights (t=2, k=1 reads column 1)
    w2 = contrarian_weights(panel, t=2, k=1)
    assert np.all(w2 == 0.0)
    with pytest.raises(ValueError):
        contrarian_weights(panel, t=0, k=1)
    with pytest.raises(ValueError):
        contrarian_weights(panel, t=5, k=1)


def test_contrarian_weights_permutation_equivariance():
    r = RandomSource(5).normals(8).reshape(4, 2)
    panel = ReturnPanel(r)
    w = contrarian_weights(panel, 1, 1)
    perm = [2, 0, 3, 1]
    wp = contrarian_weights(ReturnPanel(r[perm]), 1, 1)
    assert np.array_equal(wp, w[perm])


def test_profit_identities():
    w = np.array([-0.005, 0.005])
    r = np.array([0.01, -0.01])
    assert profit(w, r) == pytest.approx(-1e-4, abs=1e-18)
    assert gross_investment(w) == pytest.approx(0.005, abs=1e-18)
    assert unleveraged_return(w, r) == pytest.approx(-0.02, rel=1e-12)
    assert profit(w, np.zeros(2)) == 0.0
    # degenerate zero-weight period reports zero return
    assert unleveraged_return(np.zeros(2), r) == 0.0
    with pytest.raises(ValueError):
        profit(w, np.zeros(3))


def test_leverage_examples():
    # $2MM on $100MM/$100MM at Reg-T is 2%; at 8:1 the same book returns 8%
    r_pt = 2.0 / 100.0
    assert leveraged_return(r_pt, 2.0) == r_pt
    assert leveraged_return(r_pt, 8.0) == 0.08
    assert leverage_ratio(100.0, -100.0, 25.0) == 8.0
    with pytest.raises(ValueError):
        leveraged_return(0.01, 1.5)
    with pytest.raises(ValueError):
        leverage_ratio(100.0, 100.0, 0.0)


def test_expected_profit_general_examples():
    mu_eq = np.zeros(3)
    assert expected_profit_general(mu_eq, np.zeros((3, 3))) == 0.0
    # identity autocovariance: 1/N - 1 (variance hurts the contrarian)
    n = 4
    got = expected_profit_general(np.zeros(n), np.eye(n))
    assert got == pytest.approx(1.0 / n - 1.0, rel=1e-15)
    with pytest.raises(ValueError):
        expected_profit_general(np.zeros(3), np.zeros((2, 2)))


def test_expected_profit_leadlag_closed_forms():
    # N=3, unit betas, unit factor variance, equal means: 2/9
    model = LeadLagModel(np.zeros(3), np.ones(3))
    want = 2.0 / 9.0
    assert expected_profit_leadlag(model) == pytest.approx(want, rel=1e-15)
    g1 = leadlag_autocov(model, 1)
    assert expected_profit_general(model.mu, g1) == pytest.approx(want, rel=1e-15)

    # sign-flipped middle beta defeats the strategy
    flipped = LeadLagModel(np.zeros(3), np.array([1.0, -1.0, 1.0]))
    assert expected_profit_leadlag(flipped) == pytest.approx(-want, rel=1e-15)

    # no factor: only the mean-dispersion penalty remains
    disp = LeadLagModel(np.array([0.01, 0.02]), np.ones(2), sigma_lambda=0.0)
    assert expected_profit_leadlag(disp) == pytest.approx(-2.5e-5, rel=1e-12)


def test_consistency_triangle_closed_form_vs_general():
    src = RandomSource(60)
    for rep in range(10):
        rs = split_stream(src, rep)
        mu = 0.001 * rs.normals(10)
        beta = 0.5 + rs.uniforms(10)
        model = LeadLagModel(mu, beta, sigma_lambda=1.0, sigma_eps=1.0)
        a = expected_profit_leadlag(model)
        b = expected_profit_general(mu, leadlag_autocov(model, 1))
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_simulated_profit_matches_closed_form():
    # one mid-size Monte Carlo as a module-level check (the 10-rep full-scale
    # version runs in the acceptance suite)
    model = LeadLagModel(np.zeros(10), np.linspace(1.4, 0.6, 10))
    T = 200_000
    panel = simulate_leadlag(model, T, RandomSource(61))
    out = backtest(panel, k=1)
    want = expected_profit_leadlag(model)
    se = batch_means_se(out.profits, 1000)
    assert abs(out.profits.mean() - want) < 4 * se


def test_backtest_identical_rows_is_degenerate():
    panel = ReturnPanel(np.tile(RandomSource(7).normals(6), (3, 1)))
    out = backtest(panel, k=1)
    assert np.all(out.weights == 0.0)
    assert np.all(out.profits == 0.0)
    assert np.all(out.returns == 0.0)
    assert np.all(out.degenerate)


def test_backtest_antithetic_panel_always_profits():
    # returns flip sign each period, so every reversal pays the contrarian
    row = np.array([0.01, -0.01, 0.01, -0.01])
    panel = ReturnPanel(np.vstack([row, -row]))
    out = backtest(panel, k=1)
    assert np.all(out.profits > 0.0)
    assert np.all(~out.degenerate)
    # direct substitution at t = 1: w = (-0.01,; +0.01)/2... w' r_1 = 1e-4
    assert out.profits[0] == pytest.approx(1e-4, rel=1e-12)


def test_backtest_output_layout_and_neutrality():
    model = LeadLagModel(np.zeros(6), np.linspace(1.2, 0.8, 6))
    panel = simulate_leadlag(model, 500, RandomSource(62))
    out = backtest(panel, k=2, theta=8.0)
    assert out.k == 2 and out.theta == 8.0
    assert np.array_equal(out.periods, np.arange(2, 500))
    assert out.weights.shape == (498, 6)
    # dollar neutrality per period, bounded relative to gross exposure
    sums = np.abs(out.weights.sum(axis=1))
    assert np.all(sums <= 1e-12 * np.abs(out.weights).sum(axis=1).clip(min=1e-300))
    # leverage linearity
    assert np.array_equal(out.leveraged, 4.0 * out.returns)
    reg_t = backtest(panel, k=2, theta=2.0)
    assert np.array_equal(reg_t.leveraged, reg_t.returns)


def test_backtest_weight_anti_monotonicity():
    panel = simulate_leadlag(LeadLagModel(np.zeros(5), np.ones(5)), 50,
                             RandomSource(63))
    out = backtest(panel, k=1)
    for t_idx in (0, 10, 47):
        past = panel.returns[:, out.periods[t_idx] - 1]
        w = out.weights[t_idx]
        order = np.argsort(past)
        assert np.all(np.diff(w[order]) < 0.0)  # larger past return, smaller weight


def test_backtest_validation():
    panel = ReturnPanel(np.zeros((3, 4)))
    with pytest.raises(ValueError):
        backtest(panel, k=4)
    with pytest.raises(ValueError):
        backtest(panel, k=0)
    with pytest.raises(ValueError):
        backtest(panel, k=1, theta=1.0)
    with pytest.raises(ValueError):
        backtest(ReturnPanel(np.zeros((1, 4))), k=1)


def test_perf_stats():
    x = np.array([0.01, 0.03, -0.01, 0.02])
    ps = perf_stats(x)
    assert ps.mean == pytest.approx(x.mean(), rel=1e-15)
    assert ps.std == pytest.approx(x.std(ddof=1), rel=1e-15)
    assert ps.sharpe == pytest.approx(math.sqrt(250) * ps.mean / ps.std, rel=1e-15)
    doubled = perf_stats(2.0 * x)
    assert doubled.sharpe == pytest.approx(ps.sharpe, rel=1e-12)
    # the Table-style quote: mean 0.13% daily at the matching std
    quoted = perf_stats(np.array([0.0013 - 0.00736, 0.0013 + 0.00736]))
    assert quoted.sharpe == pytest.approx(math.sqrt(250) * 0.0013 / quoted.std,
                                          rel=1e-12)
    # a constant with an exact binary representation gives std identically 0
    with pytest.raises(UndefinedSharpeError):
        perf_stats(np.full(10, 0.5))
    with pytest.raises(ValueError):
        perf_stats(np.array([0.01]))


def test_batch_means_se_iid_sanity():
    x = RandomSource(64).normals(100_000)
    se = batch_means_se(x, 1000)
    want = 1.0 / math.sqrt(100_000)
    assert 0.7 * want < se < 1.3 * want
    with pytest.raises(ValueError):
        batch_means_se(x[:1500], 1000)


def test_panel_csv_round_trip(tmp_path):
    model = LeadLagModel(np.zeros(4), np.ones(4))
    panel = simulate_leadlag(model, 25, RandomSource(65))
    f = tmp_path / "panel.csv"
    write_panel_csv(f, panel)
    back = read_panel_csv(f)
    assert np.array_equal(back.returns, panel.returns)
    f2 = tmp_path / "panel2.csv"
    write_panel_csv(f2, panel)
    assert f.read_bytes() == f2.read_bytes()


def test_backtest_csv_round_trip(tmp_path):
    panel = simulate_leadlag(LeadLagModel(np.zeros(4), np.ones(4)), 30,
                             RandomSource(66))
    out = backtest(panel, k=1, theta=8.0)
    f = tmp_path / "bt.csv"
    write_backtest_csv(f, out)
    cols = read_backtest_csv(f)
    assert np.array_equal(cols["period"], out.periods)
    assert np.array_equal(cols["gross"], out.gross)
    assert np.array_equal(cols["profit"], out.profits)
    assert np.array_equal(cols["return"], out.returns)
    assert np.array_equal(cols["leveraged"], out.leveraged)
