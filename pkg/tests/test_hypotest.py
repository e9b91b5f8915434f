import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairaudit import (
    ConfusionCounts,
    DegenerateDataError,
    UndefinedMetricError,
    estimate_unfairness,
    normal_cdf,
    run_test,
)

A = ConfusionCounts(tp=79, fp=12, fn=21, tn=88)
B = ConfusionCounts(tp=68, fp=9, fn=32, tn=91)

counts_st = st.builds(
    ConfusionCounts, st.integers(1, 400), st.integers(1, 400), st.integers(1, 400), st.integers(1, 400)
)


def test_identical_counts_zero():
    assert estimate_unfairness("PPV", A, A) == 0.0


def test_tpr_gap():
    assert estimate_unfairness("TPR", A, B) == pytest.approx(0.11, abs=1e-12)


def test_dp_gap():
    c1 = ConfusionCounts(tp=4404, fp=0, fn=5596, tn=0)
    c2 = ConfusionCounts(tp=3478, fp=0, fn=6522, tn=0)
    assert estimate_unfairness("DP", c1, c2) == pytest.approx(0.0926, abs=1e-12)


def test_statistic_hand_computed():
    out = run_test("TPR", A, B, u_tol=0.0, alpha=0.05)
    se = math.sqrt(0.79 * 0.21 / 100 + 0.68 * 0.32 / 100)
    assert out.sigma_hat == pytest.approx(se, rel=1e-12)
    assert out.statistic == pytest.approx(0.11 / se, rel=1e-12)
    assert out.p_value == pytest.approx(1 - normal_cdf(0.11 / se), abs=1e-15)
    assert out.reject is False  # 1.76 < 1.96


def test_null_boundary():
    out = run_test("TPR", A, B, u_tol=estimate_unfairness("TPR", A, B), alpha=0.05)
    assert out.statistic == 0.0
    assert out.p_value == 0.5
    assert not out.reject


def test_swap_antisymmetry():
    a = run_test("DP", A, B)
    b = run_test("DP", B, A)
    assert b.statistic == pytest.approx(-a.statistic, rel=1e-14)


def test_degenerate_data():
    c = ConfusionCounts(tp=0, fp=0, fn=10, tn=10)
    with pytest.raises(DegenerateDataError):
        run_test("DP", c, c)


def test_undefined_metric_names_group():
    ok = ConfusionCounts(5, 5, 5, 5)
    bad = ConfusionCounts(0, 0, 5, 5)
    with pytest.raises(UndefinedMetricError) as info:
        run_test("PPV", ok, bad)
    assert info.value.group == "group2" and info.value.metric == "PPV"


@given(counts_st, counts_st, st.integers(2, 50))
def test_scale_consistency(c1, c2, k):
    base = run_test("NPV", c1, c2)
    big = run_test("NPV", c1.scaled(k), c2.scaled(k))
    assert big.sigma_hat == pytest.approx(base.sigma_hat / math.sqrt(k), rel=1e-10)
    assert big.statistic == pytest.approx(base.statistic * math.sqrt(k), rel=1e-9, abs=1e-12)


@given(counts_st, counts_st, st.floats(0.001, 0.5), st.floats(-0.2, 0.2))
def test_decision_consistency(c1, c2, alpha, u_tol):
    out = run_test("ACC", c1, c2, u_tol=u_tol, alpha=alpha)
    assert out.reject == (out.statistic > out.critical_value)
    assert out.p_value == pytest.approx(1 - normal_cdf(out.statistic), abs=1e-12)
    if abs(out.p_value - alpha / 2) > 1e-12:
        assert out.reject == (out.p_value < alpha / 2)


@given(st.integers(51, 99))
def test_p_value_monotone_in_u_hat(k):
    # positive-prediction rates k% and (100-k)% share one Bernoulli variance,
    # so only U_hat differs between the two tests
    ref = ConfusionCounts(tp=30, fp=20, fn=20, tn=30)
    hi = run_test("DP", ConfusionCounts(tp=k, fp=0, fn=100 - k, tn=0), ref)
    lo = run_test("DP", ConfusionCounts(tp=100 - k, fp=0, fn=k, tn=0), ref)
    assert hi.sigma_hat == pytest.approx(lo.sigma_hat, rel=1e-14)
    assert hi.u_hat > lo.u_hat
    assert hi.p_value < lo.p_value
