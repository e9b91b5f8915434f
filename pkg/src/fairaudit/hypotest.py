"""One-sided test of ``H0: U <= u_tol`` against ``U > u_tol`` on observed confusion counts."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from fairaudit.confusion import ConfusionCounts, MetricKind, metric_value, rates_from_counts
from fairaudit.errors import DegenerateDataError, UndefinedMetricError
from fairaudit.statsmath import check_probability as _check_prob
from fairaudit.statsmath import normal_cdf, normal_quantile
from fairaudit.variance import unfairness_variance


@dataclass(frozen=True)
class TestOutcome:
    """Result of :func:`run_test`.

    ``reject`` uses the critical value ``z(1 - alpha/2)``, so it is equivalent
    to ``p_value < alpha / 2``.
    """

    __test__ = False  # not a pytest class

    metric: MetricKind
    u_hat: float
    m1_hat: float
    m2_hat: float
    sigma_hat: float
    statistic: float
    critical_value: float
    p_value: float
    reject: bool
    alpha: float
    u_tol: float
    n1: int
    n2: int

    def as_dict(self) -> dict:
        d = asdict(self)
        d["metric"] = self.metric.value
        return d


def _group_metric(kind: MetricKind, c: ConfusionCounts, group: str) -> float:
    try:
        return metric_value(kind, rates_from_counts(c))
    except UndefinedMetricError as exc:
        raise UndefinedMetricError(exc.metric, exc.reason, group=group) from None


def estimate_unfairness(kind: MetricKind | str, c1: ConfusionCounts, c2: ConfusionCounts) -> float:
    """``M1_hat - M2_hat``; group 1 is the privileged group."""
    kind = MetricKind.parse(kind)
    return _group_metric(kind, c1, "group1") - _group_metric(kind, c2, "group2")


def run_test(
    kind: MetricKind | str,
    c1: ConfusionCounts,
    c2: ConfusionCounts,
    u_tol: float = 0.0,
    alpha: float = 0.05,
) -> TestOutcome:
    kind = MetricKind.parse(kind)
    _check_prob("alpha", alpha)
    m1 = _group_metric(kind, c1, "group1")
    m2 = _group_metric(kind, c2, "group2")
    # plug-in standard error from the unrestricted empirical rates
    uv = unfairness_variance(kind, rates_from_counts(c1), rates_from_counts(c2), c1.total, c2.total)
    if uv.sigma2_U == 0.0:
        raise DegenerateDataError(
            f"estimated standard error of the {kind.value} difference is zero; "
            "the test statistic is undefined"
        )
    sigma = math.sqrt(uv.sigma2_U)
    u_hat = m1 - m2
    stat = (u_hat - u_tol) / sigma
    crit = normal_quantile(1.0 - alpha / 2.0)
    return TestOutcome(
        metric=kind,
        u_hat=u_hat,
        m1_hat=m1,
        m2_hat=m2,
        sigma_hat=sigma,
        statistic=stat,
        critical_value=crit,
        p_value=normal_cdf(-stat),
        reject=stat > crit,
        alpha=alpha,
        u_tol=u_tol,
        n1=c1.total,
        n2=c2.total,
    )
