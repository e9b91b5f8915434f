"""Asymptotic variances of group metrics and of their between-group difference.

Two independent routes are provided:

* :func:`group_variance` evaluates closed forms directly;
* :func:`metric_joint_covariance` + :func:`delta_variance` express each metric
  as a function of multinomial cell-fraction means and push their covariance
  through the gradient (delta method).

Variances are per observation, i.e. ``n * Var(metric estimate)`` in the limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fairaudit.confusion import GroupRates, MetricKind, metric_value
from fairaudit.errors import ContractError, UndefinedMetricError

_SYM_TOL = 1e-12
_PSD_TOL = 1e-9


def group_variance(kind: MetricKind | str, r: GroupRates) -> float:
    """Per-observation asymptotic variance of the metric estimate in one group."""
    kind = MetricKind.parse(kind)
    m = metric_value(kind, r)
    # complement pairs share one Bernoulli factor; evaluate it on the base rate
    if kind is MetricKind.FNR:
        m = metric_value(MetricKind.TPR, r)
    elif kind is MetricKind.FPR:
        m = metric_value(MetricKind.TNR, r)
    bern = m * (1.0 - m)
    if kind in (MetricKind.DP, MetricKind.ACC):
        v = bern
    elif kind in (MetricKind.TPR, MetricKind.FNR):
        v = bern / r.prevalence
    elif kind in (MetricKind.TNR, MetricKind.FPR):
        v = bern / (1.0 - r.prevalence)
    elif kind is MetricKind.PPV:
        v = bern / r.positive_pred_rate
    else:  # NPV
        v = bern / (1.0 - r.positive_pred_rate)
    return max(v, 0.0)


def _ratio_cells(kind: MetricKind, r: GroupRates) -> tuple[float, float]:
    """(numerator, denominator) cell-fraction means of a ratio metric.

    The numerator event is always a subset of the denominator event.
    """
    tp, fp, fn, tn = r.cell_fractions()
    pairs = {
        MetricKind.TPR: (tp, tp + fn),
        MetricKind.FNR: (fn, tp + fn),
        MetricKind.TNR: (tn, tn + fp),
        MetricKind.FPR: (fp, tn + fp),
        MetricKind.PPV: (tp, tp + fp),
        MetricKind.NPV: (tn, tn + fn),
    }
    return pairs[kind]


def metric_joint_covariance(kind: MetricKind | str, r: GroupRates) -> tuple[np.ndarray, np.ndarray]:
    """Gradient and per-observation covariance for the delta method.

    Linear metrics (DP, ACC) are returned as a one-dimensional identity map on
    their own indicator mean.  Ratio metrics ``num / den`` are returned on the
    pair ``(num, den)`` with the multinomial covariance
    ``[[num(1-num), num(1-den)], [num(1-den), den(1-den)]]``.
    """
    kind = MetricKind.parse(kind)
    m = metric_value(kind, r)  # raises on undefined metrics
    if kind in (MetricKind.DP, MetricKind.ACC):
        return np.array([1.0]), np.array([[m * (1.0 - m)]])
    num, den = _ratio_cells(kind, r)
    if den == 0.0:
        raise UndefinedMetricError(kind.value, "zero denominator")
    grad = np.array([1.0 / den, -num / den**2])
    c = num * (1.0 - den)
    cov = np.array([[num * (1.0 - num), c], [c, den * (1.0 - den)]])
    return grad, cov


def validate_covariance(cov: np.ndarray) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ContractError(f"covariance must be square, got shape {cov.shape}")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=_SYM_TOL):
        raise ContractError("covariance matrix is not symmetric")
    if cov.size and np.linalg.eigvalsh(cov).min() < -_PSD_TOL:
        raise ContractError("covariance matrix is not positive semidefinite")
    return cov


def delta_variance(grad, cov) -> float:
    """Quadratic form ``grad' cov grad``; tiny negative round-off is clamped to 0."""
    g = np.asarray(grad, dtype=float)
    cov = validate_covariance(cov)
    if g.ndim != 1 or g.shape[0] != cov.shape[0]:
        raise ContractError(f"gradient of shape {g.shape} does not match covariance of shape {cov.shape}")
    v = float(g @ cov @ g)
    if v < 0.0:
        if v < -1e-12:
            raise ContractError(f"quadratic form is negative ({v})")
        v = 0.0
    return v


@dataclass(frozen=True)
class UnfairnessVariance:
    sigma2_g1: float
    sigma2_g2: float
    n1: int
    n2: int
    sigma2_U: float

    @classmethod
    def combine(cls, sigma2_g1: float, sigma2_g2: float, n1: int, n2: int) -> UnfairnessVariance:
        if n1 < 1 or n2 < 1:
            raise ContractError(f"group sizes must be >= 1, got n1={n1}, n2={n2}")
        if sigma2_g1 < 0 or sigma2_g2 < 0:
            raise ContractError("group variances must be non-negative")
        return cls(sigma2_g1, sigma2_g2, int(n1), int(n2), sigma2_g1 / n1 + sigma2_g2 / n2)

    @property
    def sigma_U(self) -> float:
        return float(np.sqrt(self.sigma2_U))


def unfairness_variance(
    kind: MetricKind | str, r1: GroupRates, r2: GroupRates, n1: int, n2: int
) -> UnfairnessVariance:
    """Variance of the estimated difference ``M1_hat - M2_hat`` for independent groups."""
    s1 = _group_variance_tagged(kind, r1, "group1")
    s2 = _group_variance_tagged(kind, r2, "group2")
    return UnfairnessVariance.combine(s1, s2, n1, n2)


def _group_variance_tagged(kind, r: GroupRates, group: str) -> float:
    try:
        return group_variance(kind, r)
    except UndefinedMetricError as exc:
        raise UndefinedMetricError(exc.metric, exc.reason, group=group) from None
