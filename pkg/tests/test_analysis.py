import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.optimize import brentq

from lotto_prealloc import analysis
from lotto_prealloc.analysis import (AboveLevel, Branch, effectiveness_equivalent_P, investment_payoff,
                                     level_curve, level_RA, level_slope, level_switch_P,
                                     optimal_investment)
from lotto_prealloc.closed_form import payoff_value

from .strategies import log_scale


@pytest.mark.parametrize("Pi, P, R_A, branch", [
    (0.75, 0.0, 2.0, Branch.QUADRATIC),
    (0.25, 0.0, 0.5, Branch.LINEAR),
    (0.0, 0.5, 0.0, Branch.LINEAR),
    (0.0, 1.0, 0.0, Branch.QUADRATIC),
])
def test_level_examples(Pi, P, R_A, branch):
    pt = level_RA(Pi, P, 1.0)
    assert pt.R_A == pytest.approx(R_A, abs=1e-12)
    assert pt.branch is branch
    assert payoff_value(1.0, 1.0, P, pt.R_A) == pytest.approx(Pi, abs=1e-12)


def test_level_at_tangency_point():
    pt = level_RA(0.75, 2.30663, 1.0)
    assert pt.branch is Branch.QUADRATIC
    assert pt.R_A == pytest.approx(0.357, abs=1e-2)
    assert pt.R_A == pytest.approx(0.358438, abs=1e-6)


def test_above_level():
    out = level_RA(0.25, 2.0, 1.0)
    assert isinstance(out, AboveLevel) and not out
    assert out.P_max == pytest.approx(4 / 3)
    assert payoff_value(1.0, 1.0, 2.0, 0.0) > 0.25


@pytest.mark.parametrize("Pi", [-0.1, 1.0, 1.5])
def test_invalid_level(Pi):
    with pytest.raises(analysis.InvalidLevel):
        level_RA(Pi, 0.0, 1.0)


def test_invalid_inputs():
    with pytest.raises(analysis.InvalidBudget):
        level_RA(0.5, -1.0, 1.0)
    with pytest.raises(analysis.InvalidBudget):
        level_RA(0.5, 0.0, 0.0)
    with pytest.raises(ValueError):
        level_curve(0.5, 1.0, num_points=1)


def test_switch_point_values():
    s = level_switch_P(0.25, 1.0, 1.0)
    assert s == pytest.approx(2 / 3)
    lin = 2 * 0.25 * (1 - s)
    quad = (1 - 0.75 * s) ** 2 / (2 * 0.75)
    assert lin == pytest.approx(1 / 6) and quad == pytest.approx(1 / 6)
    assert level_RA(0.25, s, 1.0).R_A == pytest.approx(1 / 6)
    assert level_switch_P(0.5, 1.0, 1.0) is None


def test_curve_endpoints():
    pts = level_curve(0.75, 1.0, num_points=11)
    assert (pts[0].P, pts[0].R_A) == (0.0, pytest.approx(2.0))
    assert pts[-1].P == pytest.approx(4.0) and pts[-1].R_A == pytest.approx(0.0, abs=1e-15)


def test_curve_inserts_switch_point():
    pts = level_curve(0.25, 1.0, num_points=4)
    Ps = [pt.P for pt in pts]
    assert len(pts) == 5 and pytest.approx(2 / 3) in Ps
    assert Ps == sorted(Ps)


def test_zero_level_curve():
    pts = level_curve(0.0, 1.0, num_points=3)
    assert [(pt.P, pt.R_A, pt.branch.value) for pt in pts] == [
        (0.0, 0.0, "linear"), (0.5, 0.0, "linear"), (1.0, 0.0, "quadratic")]


@given(st.floats(0.01, 0.99), log_scale, st.floats(-1, 1).map(lambda e: 10**e), st.floats(0.1, 10))
def test_curve_decreasing_and_convex(frac, R_B, q, W):
    pts = level_curve(frac * W, R_B, q, W, num_points=41)
    P = np.array([pt.P for pt in pts])
    R = np.array([pt.R_A for pt in pts])
    assert np.all(np.diff(R) < 0)
    # convexity on the (possibly non-uniform) grid: slopes non-decreasing
    slopes = np.diff(R) / np.diff(P)
    assert np.all(np.diff(slopes) >= -1e-9 * np.max(np.abs(slopes)))


@given(st.floats(0.0, 0.999), st.floats(0.0, 1.0), log_scale, st.floats(0.1, 10))
def test_level_inversion_matches_brentq(frac, pos, qRB, W):
    Pi = frac * W
    P = pos * analysis.level_P_max(Pi, qRB, W)
    pt = level_RA(Pi, P, qRB, 1.0, W)
    assume(pt.R_A > 1e-12 * qRB)
    f = lambda r: payoff_value(W, qRB, P, r) - Pi
    hi = max(1.0, pt.R_A)
    while f(hi) < 0:
        hi *= 2
    root = brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-14)
    assert pt.R_A == pytest.approx(root, rel=1e-8, abs=1e-12 * qRB)


@given(st.floats(0.01, 0.49), log_scale, st.floats(0.1, 10))
def test_switch_is_c1(frac, qRB, W):
    Pi = frac * W
    s = level_switch_P(Pi, qRB, W)
    h = 1e-6 * max(s, 1e-3)
    left = level_RA(Pi, s - h, qRB, 1.0, W)
    right = level_RA(Pi, s + h, qRB, 1.0, W)
    assert left.branch is Branch.LINEAR and right.branch is Branch.QUADRATIC
    mid = level_RA(Pi, s, qRB, 1.0, W).R_A
    d_left = (mid - left.R_A) / h
    d_right = (right.R_A - mid) / h
    assert d_left == pytest.approx(-2 * Pi / W, abs=1e-6)
    assert d_right == pytest.approx(-2 * Pi / W, abs=1e-6)
    assert level_slope(Pi, s, qRB, 1.0, W) == pytest.approx(-2 * Pi / W, rel=1e-12)


@pytest.mark.parametrize("R_A, qRB, P_bar", [(1.0, 1.0, 2.0), (0.5, 1.0, 4 / 3), (2.0, 1.0, 4.0)])
def test_effectiveness_examples(R_A, qRB, P_bar):
    got = effectiveness_equivalent_P(R_A, qRB)
    assert got == pytest.approx(P_bar, rel=1e-14)
    assert payoff_value(1, qRB, got, 0) == pytest.approx(payoff_value(1, qRB, 0, R_A), abs=1e-14)


def test_effectiveness_grows_without_bound():
    assert effectiveness_equivalent_P(1e-6, 1.0) / 1e-6 > 1e5
    with pytest.raises(analysis.InvalidBudget):
        effectiveness_equivalent_P(0.0, 1.0)


@given(log_scale, log_scale, st.floats(-1, 1).map(lambda e: 10**e))
def test_effectiveness_property(R_A, R_B, q):
    P_bar = effectiveness_equivalent_P(R_A, R_B, q)
    assert P_bar / R_A >= 2.0
    a = payoff_value(1.0, q * R_B, P_bar, 0.0)
    b = payoff_value(1.0, q * R_B, 0.0, R_A)
    assert a == pytest.approx(b, abs=1e-10)


def test_investment_cheap_preallocation():
    inv = optimal_investment(4 / 3, 0.423, 1.0)
    assert inv.t == 1.0 and inv.interval is None
    assert inv.P_star == pytest.approx(2.306601, abs=1e-6)
    assert inv.R_A_star == pytest.approx(0.357641, abs=1e-6)
    assert (inv.P_star, inv.R_A_star) == (pytest.approx(2.309, abs=1e-2), pytest.approx(0.357, abs=1e-2))
    assert inv.payoff == pytest.approx(0.749848, abs=1e-6)


def test_investment_expensive_preallocation():
    inv = optimal_investment(4 / 3, 1.333, 1.0)
    assert (inv.P_star, inv.R_A_star) == (0.0, 4 / 3)
    assert inv.payoff == pytest.approx(0.625, abs=1e-12)
    inv = optimal_investment(0.5, 1.0, 1.0)
    assert (inv.P_star, inv.R_A_star, inv.t) == (0.0, 0.5, 0.5)
    assert inv.payoff == pytest.approx(0.25, abs=1e-12)


def test_investment_at_threshold_reports_interval():
    inv = optimal_investment(0.5, 0.5, 1.0)
    assert inv.P_star == 0.0 and inv.interval is not None
    lo, hi = inv.interval
    assert lo == 0.0 and hi == pytest.approx((1 - 0.5 / 1.5) * 0.5 / 0.5)
    for P in np.linspace(lo, hi, 7):
        assert investment_payoff(P, 0.5 - 0.5 * P, 1.0) == pytest.approx(inv.payoff, abs=1e-12)


def test_investment_errors():
    with pytest.raises(analysis.InvalidCost):
        optimal_investment(1.0, 0.0, 1.0)
    with pytest.raises(analysis.InvalidBudget):
        optimal_investment(0.0, 0.5, 1.0)


@given(log_scale, st.floats(0.01, 3.0), log_scale, st.floats(0.1, 10))
def test_investment_consistent(X_A, c, qRB, W):
    inv = optimal_investment(X_A, c, qRB, 1.0, W)
    assert c * inv.P_star + inv.R_A_star == pytest.approx(X_A, rel=1e-12)
    assert inv.payoff == pytest.approx(investment_payoff(inv.P_star, inv.R_A_star, qRB, 1.0, W), rel=1e-9)


@given(log_scale, st.floats(0.01, 3.0), log_scale)
def test_investment_tangency(X_A, c, qRB):
    inv = optimal_investment(X_A, c, qRB)
    assume(c < inv.t * (1 - 1e-9))
    slope = level_slope(inv.payoff, inv.P_star, qRB)
    assert slope == pytest.approx(-c, abs=1e-8)
