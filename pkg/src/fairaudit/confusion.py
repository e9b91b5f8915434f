"""Confusion-matrix counts, population rates and the performance metrics derived from them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from fairaudit.errors import ContractError, UndefinedMetricError


class MetricKind(str, enum.Enum):
    """Performance metric whose between-group difference defines unfairness."""

    DP = "DP"
    TPR = "TPR"
    FNR = "FNR"
    TNR = "TNR"
    FPR = "FPR"
    PPV = "PPV"
    NPV = "NPV"
    ACC = "ACC"

    @classmethod
    def parse(cls, value: str | MetricKind) -> MetricKind:
        if isinstance(value, MetricKind):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ContractError(f"unknown metric {value!r}; expected one of {names}") from None

    @property
    def needs_labels(self) -> bool:
        """Whether estimating the metric requires ground-truth labels."""
        return self is not MetricKind.DP


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise ContractError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def scaled(self, k: int) -> ConfusionCounts:
        return ConfusionCounts(self.tp * k, self.fp * k, self.fn * k, self.tn * k)

    def __add__(self, other: ConfusionCounts) -> ConfusionCounts:
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


def _check_unit(name: str, v: float) -> float:
    v = float(v)
    if not (0.0 <= v <= 1.0) or math.isnan(v):
        raise ContractError(f"{name} must lie in [0, 1], got {v!r}")
    return v


@dataclass(frozen=True)
class GroupRates:
    """Population rates of one group, parameterized by (prevalence, tpr, tnr).

    ``tpr`` may be ``None`` only when the prevalence is 0, and ``tnr`` only when
    the prevalence is 1; this is how rates estimated from counts flag ratios
    whose denominator is empty.  Any metric that needs the missing rate raises
    :class:`UndefinedMetricError`.
    """

    prevalence: float
    tpr: float | None
    tnr: float | None

    def __post_init__(self):
        object.__setattr__(self, "prevalence", _check_unit("prevalence", self.prevalence))
        if self.tpr is None:
            if self.prevalence != 0.0:
                raise ContractError("tpr may only be omitted when prevalence is 0")
        else:
            object.__setattr__(self, "tpr", _check_unit("tpr", self.tpr))
        if self.tnr is None:
            if self.prevalence != 1.0:
                raise ContractError("tnr may only be omitted when prevalence is 1")
        else:
            object.__setattr__(self, "tnr", _check_unit("tnr", self.tnr))

    @classmethod
    def for_positive_rate(cls, positive_pred_rate: float) -> GroupRates:
        """Rates reproducing a given positive-prediction rate.

        Only demographic parity is meaningful for such a group: the returned
        prevalence/tpr/tnr are an arbitrary completion (prevalence 1/2,
        tpr = M_PP, tnr = 1 - M_PP).
        """
        m = _check_unit("positive_pred_rate", positive_pred_rate)
        return cls(prevalence=0.5, tpr=m, tnr=1.0 - m)

    # cell fractions; an undefined rate only ever appears with zero weight
    @property
    def tp_frac(self) -> float:
        return self.prevalence * self.tpr if self.tpr is not None else 0.0

    @property
    def fn_frac(self) -> float:
        return self.prevalence * (1.0 - self.tpr) if self.tpr is not None else 0.0

    @property
    def tn_frac(self) -> float:
        return (1.0 - self.prevalence) * self.tnr if self.tnr is not None else 0.0

    @property
    def fp_frac(self) -> float:
        return (1.0 - self.prevalence) * (1.0 - self.tnr) if self.tnr is not None else 0.0

    @property
    def positive_pred_rate(self) -> float:
        return self.tp_frac + self.fp_frac

    def cell_fractions(self) -> tuple[float, float, float, float]:
        """(tp, fp, fn, tn) fractions, summing to one."""
        return (self.tp_frac, self.fp_frac, self.fn_frac, self.tn_frac)

    def as_dict(self) -> dict[str, float | None]:
        return {
            "prevalence": self.prevalence,
            "tpr": self.tpr,
            "tnr": self.tnr,
            "positive_pred_rate": self.positive_pred_rate,
        }


def rates_from_counts(c: ConfusionCounts) -> GroupRates:
    n = c.total
    if n < 1:
        raise ContractError("cannot estimate rates from an empty confusion matrix")
    pos = c.tp + c.fn
    neg = c.fp + c.tn
    return GroupRates(
        prevalence=pos / n,
        tpr=c.tp / pos if pos else None,
        tnr=c.tn / neg if neg else None,
    )


def _need(rate: float | None, kind: MetricKind, what: str) -> float:
    if rate is None:
        raise UndefinedMetricError(kind.value, f"no {what} in the group")
    return rate


def metric_value(kind: MetricKind | str, r: GroupRates) -> float:
    """Value of the performance metric ``kind`` for a group with rates ``r``."""
    kind = MetricKind.parse(kind)
    if kind is MetricKind.DP:
        return r.positive_pred_rate
    if kind in (MetricKind.TPR, MetricKind.FNR):
        tpr = _need(r.tpr, kind, "actual positives")
        return tpr if kind is MetricKind.TPR else 1.0 - tpr
    if kind in (MetricKind.TNR, MetricKind.FPR):
        tnr = _need(r.tnr, kind, "actual negatives")
        return tnr if kind is MetricKind.TNR else 1.0 - tnr
    if kind is MetricKind.PPV:
        pp = r.positive_pred_rate
        if pp == 0.0:
            raise UndefinedMetricError(kind.value, "no positive predictions in the group")
        return min(1.0, r.tp_frac / pp)
    if kind is MetricKind.NPV:
        npred = r.tn_frac + r.fn_frac
        if npred == 0.0:
            raise UndefinedMetricError(kind.value, "no negative predictions in the group")
        return min(1.0, r.tn_frac / npred)
    if kind is MetricKind.ACC:
        return r.tp_frac + r.tn_frac
    raise AssertionError(kind)  # pragma: no cover
