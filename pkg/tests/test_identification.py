"""Supply/demand equilibria: OLS is biased, 2SLS recovers the curves."""

import math

import numpy as np
import pytest

from stochlab.identification import (
    GENERIC_MARKET,
    EquilibriumData,
    MarketParams,
    SingularSystemError,
    WeakInstrumentError,
    ols_plim_slope,
    ols_slope,
    read_estimates_csv,
    read_market_csv,
    simulate_market,
    two_stage_least_squares,
    write_estimates_csv,
    write_market_csv,
)
from stochlab.rng import RandomSource, split_stream


def test_params_validation():
    with pytest.raises(SingularSystemError):
        MarketParams(d0=1, d1=0.5, d2=0, s0=0, s1=0.5, s2=0)
    with pytest.warns(UserWarning):
        MarketParams(d0=1, d1=0.5, d2=0, s0=0, s1=1.0, s2=0)  # d1 > 0
    with pytest.raises(ValueError):
        MarketParams(d0=1, d1=-1, d2=0, s0=0, s1=1, s2=0, sigma_d=-0.1)


def test_equilibrium_data_validation():
    with pytest.raises(ValueError):
        EquilibriumData(np.ones(3), np.ones(3), np.ones(3), np.ones(4))
    with pytest.raises(ValueError):
        EquilibriumData(np.ones((2, 2)), np.ones(4), np.ones(4), np.ones(4))


def test_zero_shock_market_is_the_intersection():
    params = MarketParams(d0=10, d1=-1, d2=0.5, s0=2, s1=1, s2=0.25,
                          sigma_d=0, sigma_s=0, y_mean=2.0, y_std=0,
                          c_mean=4.0, c_std=0)
    data = simulate_market(params, 50, RandomSource(1))
    p_star = ((10 - 2) + 0.5 * 2.0 - 0.25 * 4.0) / (1 - (-1))
    q_star = 10 - p_star + 0.5 * 2.0
    assert np.all(data.P == p_star)
    assert np.all(data.Q == q_star)
    with pytest.raises(ValueError):
        simulate_market(params, 0, RandomSource(1))


def test_rows_satisfy_the_reduced_form():
    src = RandomSource(2)
    data = simulate_market(GENERIC_MARKET, 400, src)
    # consumes exactly T draws each for Y, C, demand shocks, supply shocks
    assert src.position == 4 * 400
    # reconstruct shocks from the two structural equations and verify the
    # reduced-form price on every row
    p = GENERIC_MARKET
    ed = data.Q - (p.d0 + p.d1 * data.P + p.d2 * data.Y)
    es = data.Q - (p.s0 + p.s1 * data.P + p.s2 * data.C)
    want_p = ((p.d0 - p.s0) + p.d2 * data.Y - p.s2 * data.C + ed - es) \
        / (p.s1 - p.d1)
    assert np.allclose(data.P, want_p, rtol=1e-10, atol=0)


def test_d0_shift_moves_mean_price_by_reduced_form_amount():
    T = 100_000
    base = simulate_market(GENERIC_MARKET, T, RandomSource(3, stream_id=1))
    shifted_params = MarketParams(d0=GENERIC_MARKET.d0 + 1.0, d1=-1.0, d2=0.5,
                                  s0=2.0, s1=1.0, s2=0.5)
    shifted = simulate_market(shifted_params, T, RandomSource(3, stream_id=2))
    diff = shifted.P.mean() - base.P.mean()
    se = math.sqrt(base.P.var(ddof=1) / T + shifted.P.var(ddof=1) / T)
    assert abs(diff - 1.0 / 2.0) < 3 * se  # delta d0 / (s1 - d1)


def test_ols_on_exact_line():
    p = np.linspace(0.0, 3.0, 40)
    q = 1.5 - 0.75 * p
    fit = ols_slope(EquilibriumData(p, q, np.zeros(40), np.zeros(40)))
    assert fit.slope == pytest.approx(-0.75, rel=1e-12)
    assert fit.intercept == pytest.approx(1.5, rel=1e-12)
    assert fit.se < 1e-10


def test_ols_validation():
    flat = EquilibriumData(np.ones(10), np.arange(10.0), np.zeros(10),
                           np.zeros(10))
    with pytest.raises(ValueError):
        ols_slope(flat)  # zero regressor variance
    short = EquilibriumData(np.arange(2.0), np.arange(2.0), np.zeros(2),
                            np.zeros(2))
    with pytest.raises(ValueError):
        ols_slope(short)


def test_ols_converges_to_variance_weighted_blend():
    # no exogenous shifters: the naive slope estimates neither curve but the
    # blend (d1 sigma_s^2 + s1 sigma_d^2) / (sigma_s^2 + sigma_d^2)
    params = MarketParams(d0=5, d1=-1.5, d2=0.0, s0=1, s1=0.8, s2=0.0,
                          sigma_d=1.2, sigma_s=0.6)
    want = ols_plim_slope(params)
    assert want == pytest.approx((-1.5 * 0.36 + 0.8 * 1.44) / 1.8, rel=1e-12)
    fit = ols_slope(simulate_market(params, 100_000, RandomSource(4)))
    assert abs(fit.slope - want) < 3 * fit.se
    assert ols_plim_slope(GENERIC_MARKET) == 0.0  # unit shocks, d1 = -s1
    with pytest.raises(ValueError):
        ols_plim_slope(MarketParams(d0=1, d1=-1, d2=0, s0=0, s1=1, s2=0,
                                    sigma_d=0, sigma_s=0))


def test_demand_only_shocks_trace_the_supply_curve():
    params = MarketParams(d0=10, d1=-1, d2=0.0, s0=2, s1=1, s2=0.0,
                          sigma_d=1.0, sigma_s=0.0, y_std=0.0, c_std=0.0)
    fit = ols_slope(simulate_market(params, 500, RandomSource(5)))
    assert fit.slope == pytest.approx(1.0, rel=1e-9)
    assert fit.intercept == pytest.approx(2.0, rel=1e-9)


def test_noiseless_two_stage_recovery_is_exact():
    # zero structural shocks: every point lies on the demand curve, C moves
    # the supply curve along it, and 2SLS returns the coefficients to
    # numerical precision (Y must vary or the d2 column has no rank)
    params = MarketParams(d0=10, d1=-1, d2=0.5, s0=2, s1=1, s2=0.5,
                          sigma_d=0.0, sigma_s=0.0)
    data = simulate_market(params, 300, RandomSource(6))
    fit = two_stage_least_squares(data, "demand")
    assert fit.intercept == pytest.approx(10.0, rel=1e-8)
    assert fit.price_coef == pytest.approx(-1.0, rel=1e-8)
    assert fit.exog_coef == pytest.approx(0.5, rel=1e-8)
    assert max(fit.se_intercept, fit.se_price_coef, fit.se_exog_coef) < 1e-6
    # the first stage is noiseless up to rounding, so |t| is effectively
    # infinite but not literally inf
    assert abs(fit.first_stage_t) > 1e6
    sup = two_stage_least_squares(data, "supply")
    assert sup.price_coef == pytest.approx(1.0, rel=1e-8)
    assert sup.exog_coef == pytest.approx(0.5, rel=1e-8)


def test_generic_market_contrast_between_ols_and_two_stage():
    data = simulate_market(GENERIC_MARKET, 100_000, RandomSource(7))
    dem = two_stage_least_squares(data, "demand")
    assert abs(dem.price_coef - GENERIC_MARKET.d1) < 3 * dem.se_price_coef
    sup = two_stage_least_squares(data, "supply")
    assert abs(sup.price_coef - GENERIC_MARKET.s1) < 3 * sup.se_price_coef
    naive = ols_slope(data)
    assert abs(naive.slope - GENERIC_MARKET.d1) > 10 * naive.se
    with pytest.raises(ValueError):
        two_stage_least_squares(data, "marshall")


def test_no_exogenous_shifters_means_no_instruments():
    params = MarketParams(d0=5, d1=-1, d2=0.0, s0=1, s1=1, s2=0.0)
    data = simulate_market(params, 2000, RandomSource(8))
    for equation in ("demand", "supply"):
        with pytest.raises(WeakInstrumentError):
            two_stage_least_squares(data, equation)


def test_two_stage_rmse_halves_when_t_quadruples():
    # frozen master seed: an RMSE over 50 replications has ~10% relative
    # noise, so the [1.7, 2.3] band around the theoretical 2 rejects an
    # unlucky third of seeds; seed 10 sits at 1.99
    def rmse(T, lane):
        errs = []
        master = RandomSource(10, stream_id=lane)
        for rep in range(50):
            data = simulate_market(GENERIC_MARKET, T, split_stream(master, rep))
            fit = two_stage_least_squares(data, "demand")
            errs.append(fit.price_coef - GENERIC_MARKET.d1)
        return math.sqrt(np.mean(np.square(errs)))

    ratio = rmse(500, 1) / rmse(2000, 2)
    assert 1.7 <= ratio <= 2.3


def test_shifting_costs_changes_only_intercepts():
    data = simulate_market(GENERIC_MARKET, 5000, RandomSource(10))
    moved = EquilibriumData(data.P, data.Q, data.Y, data.C + 7.0)
    for equation in ("demand", "supply"):
        a = two_stage_least_squares(data, equation)
        b = two_stage_least_squares(moved, equation)
        assert b.price_coef == pytest.approx(a.price_coef, rel=1e-8)
    # for the supply equation the C shift is absorbed by the intercept
    a = two_stage_least_squares(data, "supply")
    b = two_stage_least_squares(moved, "supply")
    assert b.intercept == pytest.approx(a.intercept - 7.0 * a.exog_coef,
                                        rel=1e-6)


def test_market_csv_round_trip(tmp_path):
    data = simulate_market(GENERIC_MARKET, 64, RandomSource(11))
    f = tmp_path / "market.csv"
    write_market_csv(f, data)
    first = f.read_bytes()
    back = read_market_csv(f)
    for name in ("P", "Q", "Y", "C"):
        assert np.array_equal(getattr(back, name), getattr(data, name))
    write_market_csv(f, back)
    assert f.read_bytes() == first
    f.write_text("P,Q,C,Y\n1,2,3,4\n")
    with pytest.raises(ValueError):
        read_market_csv(f)
    f.write_text("P,Q,Y,C\n1,2,3\n")
    with pytest.raises(ValueError):
        read_market_csv(f)
    f.write_text("P,Q,Y,C\n")
    with pytest.raises(ValueError):
        read_market_csv(f)


def test_estimates_csv_round_trip(tmp_path):
    data = simulate_market(GENERIC_MARKET, 4000, RandomSource(12))
    naive = ols_slope(data)
    dem = two_stage_least_squares(data, "demand")
    sup = two_stage_least_squares(data, "supply")
    f = tmp_path / "estimates.csv"
    write_estimates_csv(f, GENERIC_MARKET, naive, dem, sup)
    rows = read_estimates_csv(f)
    assert len(rows) == 6
    assert [r["equation"] for r in rows] == ["demand"] * 3 + ["supply"] * 3
    by_key = {(r["equation"], r["parameter"]): r for r in rows}
    d1_row = by_key[("demand", "price_coef")]
    assert d1_row["truth"] == -1.0
    assert d1_row["ols"] == naive.slope
    assert d1_row["tsls"] == dem.price_coef
    assert d1_row["tsls_se"] == dem.se_price_coef
    # the naive fit has no exogenous column, written as nan
    assert math.isnan(by_key[("demand", "exog_coef")]["ols"])
    assert by_key[("supply", "price_coef")]["truth"] == 1.0
    assert by_key[("supply", "exog_coef")]["tsls"] == sup.exog_coef
    f.write_text("equation,parameter,truth\n")
    with pytest.raises(ValueError):
        read_estimates_csv(f)
