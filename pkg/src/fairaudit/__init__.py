"""Sample-size design and hypothesis testing for fairness audits of binary classifiers."""

from fairaudit.confusion import ConfusionCounts, GroupRates, MetricKind, metric_value, rates_from_counts
from fairaudit.design import (
    AuditDesignInput,
    AuditDesignOutput,
    achieved_power,
    optimal_allocation,
    power_curve,
    sample_size,
)
from fairaudit.errors import (
    AuditError,
    ContractError,
    DegenerateDataError,
    DegenerateGroupError,
    DomainError,
    InfeasibleDesignError,
    UndefinedMetricError,
    UnreliableEstimateError,
)
from fairaudit.hypotest import TestOutcome, estimate_unfairness, run_test
from fairaudit.simulate import (
    PopulationSpec,
    SimConfig,
    SimResult,
    draw_group_sample,
    empirical_variance_check,
    run_replicates,
)
from fairaudit.statsmath import normal_cdf, normal_quantile
from fairaudit.variance import (
    UnfairnessVariance,
    delta_variance,
    group_variance,
    metric_joint_covariance,
    unfairness_variance,
)

__version__ = "0.1.0"
