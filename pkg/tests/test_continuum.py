import math

import numpy as np
import pytest

from prophetlab.continuum import (
    alpha_closed,
    alpha_numeric,
    alpha_one,
    alpha_rhs,
    beta,
    s_star,
    single_choice_threshold,
    single_choice_value,
    stop_value,
)

LAM, THETA = 1.4737, 2.8224
PARAMS = [(LAM, THETA), (1.0, 1.0), (2.0, 4.0), (1.2, 6.0)]


@pytest.fixture(scope="module")
def headline():
    return alpha_numeric(LAM, THETA, 1e-4)


def test_beta_and_stop_value():
    assert beta(0, 3) == 0
    assert beta(2, 1) == pytest.approx(1 - math.exp(-1))
    assert np.allclose(stop_value(np.array([0.0, 1.0]), 2.0), [1.0, 2 - math.exp(-1)])


def test_s_star_headline():
    assert s_star(LAM, THETA) == pytest.approx(0.603076, abs=1e-4)
    with pytest.raises(ValueError):
        s_star(0, 1)


def test_numeric_crossing(headline):
    assert headline.s_star == pytest.approx(0.6031, abs=1e-4)
    assert headline.s_star == pytest.approx(s_star(LAM, THETA), abs=2e-4)


@pytest.mark.parametrize("lam,theta", PARAMS)
def test_numeric_matches_closed_form_before_crossing(lam, theta):
    sol = alpha_numeric(lam, theta, 1e-4)
    sc = s_star(lam, theta)
    before = sol.grid <= sc
    assert np.max(np.abs(sol.alpha_values[before] - alpha_closed(sol.grid[before], lam, theta))) < 1e-6
    assert sol.alpha_values[-1] == pytest.approx(alpha_one(lam, theta), abs=1e-6)


@pytest.mark.parametrize("lam,theta", PARAMS)
def test_linear_after_crossing_and_no_recrossing(lam, theta):
    sol = alpha_numeric(lam, theta, 1e-4)
    sc = s_star(lam, theta)
    after = sol.grid[:-1] > sc + 0.01
    slope = np.diff(sol.alpha_values) / np.diff(sol.grid)
    assert np.max(np.abs(slope[after] - lam)) < 1e-4
    first = np.argmax(sol.alpha_values >= sol.one_plus_beta)
    assert np.all(sol.alpha_values[first:] >= sol.one_plus_beta[first:])
    assert np.all(np.diff(sol.alpha_values) >= 0)


def test_closed_form_is_continuous_at_crossing():
    sc = s_star(LAM, THETA)
    assert alpha_closed(sc, LAM, THETA) == pytest.approx(stop_value(sc, THETA), abs=1e-12)
    assert alpha_closed(sc - 1e-9, LAM, THETA) == pytest.approx(alpha_closed(sc + 1e-9, LAM, THETA), abs=1e-8)


def test_theta_zero_rolls_linearly():
    sol = alpha_numeric(1.3, 0.0, 1e-3)
    assert np.allclose(sol.alpha_values, 1.3 * sol.grid, atol=1e-12)


def observed_orders(split):
    target = alpha_one(LAM, THETA)
    errs = [abs(alpha_numeric(LAM, THETA, h, split_kink=split).alpha_values[-1] - target)
            for h in (1e-2, 5e-3, 2.5e-3)]
    return [math.log2(a / b) for a, b in zip(errs, errs[1:])]


def test_fourth_order_convergence():
    for order in observed_orders(split=True):
        assert 3.5 <= order <= 5.0


def test_unsplit_kink_loses_order():
    # stepping straight over the kink is what the crossing split repairs
    assert min(observed_orders(split=False)) < 3.0


def test_rhs_uses_max_of_alpha_and_stop_value():
    assert alpha_rhs(0.0, 0.0, LAM, THETA) == pytest.approx(LAM + THETA)
    assert alpha_rhs(0.5, 5.0, LAM, THETA) == LAM


def test_step_validation():
    with pytest.raises(ValueError):
        alpha_numeric(LAM, THETA, 0.1)
    with pytest.raises(ValueError):
        alpha_one(0.5, 0.5)


def test_solution_interpolation_and_csv(headline, tmp_path):
    assert headline.at(0.5) == pytest.approx(alpha_closed(0.5, LAM, THETA), abs=1e-9)
    path = tmp_path / "alpha.csv"
    text = headline.to_csv(path)
    lines = text.splitlines()
    assert lines[0] == "t,alpha,one_plus_beta"
    assert len(lines) == len(headline.grid) + 1
    assert path.read_text() == text


def test_single_choice_value():
    lam = (1 + math.sqrt(3)) / 2
    assert single_choice_value(lam) / (lam + 1) == pytest.approx(math.sqrt(3) - 1, abs=1e-12)
    T = single_choice_threshold(lam)
    assert single_choice_value(lam, T) == pytest.approx(single_choice_value(lam), abs=1e-14)
    # T* maximizes the threshold value
    for T2 in (T - 0.05, T + 0.05, 0.0, 1.0):
        assert single_choice_value(lam, T2) < single_choice_value(lam, T)
    assert single_choice_value(2.0, 1.0) == 2.0
