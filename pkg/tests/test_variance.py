import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import multinomial_delta_variance

from fairaudit import (
    ContractError,
    GroupRates,
    MetricKind,
    UndefinedMetricError,
    UnfairnessVariance,
    delta_variance,
    group_variance,
    metric_joint_covariance,
    unfairness_variance,
)

rates_st = st.builds(
    GroupRates,
    st.floats(0.02, 0.98),
    st.floats(0.02, 0.98),
    st.floats(0.02, 0.98),
)


def test_dp_income_example_value(income_rates):
    r1, r2 = income_rates
    assert group_variance("DP", r1) == pytest.approx(0.22683516, abs=1e-12)
    assert round(group_variance("DP", r1), 3) == 0.227
    assert round(group_variance("DP", r2), 3) == 0.246


def test_dp_bernoulli_max():
    assert group_variance("DP", GroupRates.for_positive_rate(0.5)) == 0.25


def test_tpr_table_row():
    assert group_variance("TPR", GroupRates(0.5, 0.5, 0.7)) == pytest.approx(0.5, abs=1e-15)


def test_ppv_uses_ppv_bernoulli_factor():
    r = GroupRates(0.5, 0.8, 0.6)
    ppv = 2 / 3
    assert group_variance("PPV", r) == pytest.approx(ppv * (1 - ppv) / 0.6, abs=1e-12)
    assert group_variance("PPV", r) == pytest.approx(0.37037037, abs=1e-8)


def test_delta_projection_and_zero_gradient():
    cov = np.array([[0.21, 0.05], [0.05, 0.3]])
    assert delta_variance([1.0, 0.0], cov) == pytest.approx(0.21, abs=1e-15)
    assert delta_variance([0.0, 0.0], cov) == 0.0


def test_delta_tpr_hand_quadratic_form():
    mp, tpr = 0.5, 0.6
    mtp = mp * tpr
    cov = np.array([[mtp * (1 - mtp), mtp * (1 - mp)], [mtp * (1 - mp), mp * (1 - mp)]])
    grad = np.array([1 / mp, -tpr / mp])
    assert delta_variance(grad, cov) == pytest.approx(0.48, abs=1e-12)
    assert group_variance("TPR", GroupRates(mp, tpr, 0.9)) == pytest.approx(0.48, abs=1e-12)


def test_joint_covariance_tpr_matches_displayed_matrix():
    grad, cov = metric_joint_covariance("TPR", GroupRates(0.5, 0.6, 0.9))
    np.testing.assert_allclose(cov, [[0.21, 0.15], [0.15, 0.25]], atol=1e-15)
    np.testing.assert_allclose(grad, [2.0, -1.2], atol=1e-15)
    assert delta_variance(grad, cov) == pytest.approx(0.48, abs=1e-12)


def test_joint_covariance_dp_is_one_dimensional(income_rates):
    grad, cov = metric_joint_covariance("DP", income_rates[0])
    assert grad.shape == (1,) and cov.shape == (1, 1)
    assert delta_variance(grad, cov) == group_variance("DP", income_rates[0])


def test_joint_covariance_ppv():
    grad, cov = metric_joint_covariance("PPV", GroupRates(0.5, 0.8, 0.6))
    np.testing.assert_allclose(grad, [1 / 0.6, -0.4 / 0.36], rtol=1e-12)
    assert delta_variance(grad, cov) == pytest.approx(0.37037037, abs=1e-8)


def test_delta_dimension_mismatch():
    with pytest.raises(ContractError):
        delta_variance([1.0, 2.0, 3.0], np.eye(2))


def test_delta_rejects_asymmetric():
    with pytest.raises(ContractError):
        delta_variance([1.0, 1.0], [[1.0, 0.5], [0.0, 1.0]])


@pytest.mark.parametrize("kind", list(MetricKind))
def test_engine_equals_closed_form(kind, rates):
    grad, cov = metric_joint_covariance(kind, rates)
    assert delta_variance(grad, cov) == pytest.approx(group_variance(kind, rates), abs=1e-12, rel=0)


@pytest.mark.parametrize("kind", list(MetricKind))
def test_closed_form_equals_full_multinomial_oracle(kind, rates):
    oracle = multinomial_delta_variance(kind.value, rates.prevalence, rates.tpr, rates.tnr)
    assert group_variance(kind, rates) == pytest.approx(oracle, rel=1e-6)


@given(rates_st, st.sampled_from(list(MetricKind)))
def test_engine_equals_closed_form_property(r, kind):
    grad, cov = metric_joint_covariance(kind, r)
    closed = group_variance(kind, r)
    assert delta_variance(grad, cov) == pytest.approx(closed, abs=1e-12, rel=1e-12)
    assert closed >= 0


@given(rates_st)
def test_complement_pairs_share_variance(r):
    assert group_variance("FNR", r) == group_variance("TPR", r)
    assert group_variance("FPR", r) == group_variance("TNR", r)


@given(rates_st, st.sampled_from(list(MetricKind)))
def test_covariance_is_psd(r, kind):
    _, cov = metric_joint_covariance(kind, r)
    assert np.allclose(cov, cov.T, atol=1e-12)
    assert np.linalg.eigvalsh(cov).min() >= -1e-9


def test_degenerate_rates_zero_variance():
    assert group_variance("DP", GroupRates.for_positive_rate(0.0)) == 0.0
    assert group_variance("TPR", GroupRates(0.3, 1.0, 0.5)) == 0.0


def test_undefined_denominator():
    with pytest.raises(UndefinedMetricError):
        group_variance("TPR", GroupRates(0.0, None, 0.5))
    with pytest.raises(UndefinedMetricError):
        metric_joint_covariance("PPV", GroupRates(0.5, 0.0, 1.0))


def test_unfairness_variance_income_example(income_rates):
    uv = unfairness_variance("DP", *income_rates, 1000, 1000)
    assert uv.sigma2_U == pytest.approx(4.73e-4, abs=1e-6)
    assert UnfairnessVariance.combine(0.227, 0.246, 1000, 1000).sigma2_U == pytest.approx(4.73e-4, rel=1e-12)


def test_unfairness_variance_identical_groups():
    r = GroupRates(0.3, 0.7, 0.8)
    uv = unfairness_variance("TNR", r, r, 250, 250)
    assert uv.sigma2_U == pytest.approx(2 * group_variance("TNR", r) / 250, rel=1e-14)


def test_unfairness_variance_tpr_sum():
    r1, r2 = GroupRates(0.35, 0.79, 0.9), GroupRates(0.22, 0.68, 0.9)
    expected = 0.79 * 0.21 / 0.35 + 0.68 * 0.32 / 0.22
    assert unfairness_variance("TPR", r1, r2, 1, 1).sigma2_U == pytest.approx(expected, abs=1e-12)


def test_unfairness_variance_names_group():
    with pytest.raises(UndefinedMetricError) as info:
        unfairness_variance("TPR", GroupRates(0.3, 0.7, 0.8), GroupRates(0.0, None, 0.8), 10, 10)
    assert info.value.group == "group2"


@given(rates_st, rates_st, st.integers(1, 10**6), st.integers(1, 10**6))
def test_unfairness_variance_invariant(r1, r2, n1, n2):
    uv = unfairness_variance("NPV", r1, r2, n1, n2)
    assert uv.sigma2_U == pytest.approx(uv.sigma2_g1 / n1 + uv.sigma2_g2 / n2, abs=1e-12)
