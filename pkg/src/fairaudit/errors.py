"""Exception hierarchy shared across the package."""

from __future__ import annotations


class AuditError(Exception):
    """Base class for every error raised by fairaudit."""


class DomainError(AuditError, ValueError):
    """Argument outside the mathematical domain of a function."""


class ContractError(AuditError, ValueError):
    """Precondition violated by the caller (shapes, empty inputs, bad counts)."""


class UndefinedMetricError(AuditError, ArithmeticError):
    """A metric (or its variance) has a zero denominator."""

    def __init__(self, metric: str, reason: str, group: str | None = None):
        self.metric = metric
        self.group = group
        self.reason = reason
        where = f" in group {group!r}" if group is not None else ""
        super().__init__(f"{metric} is undefined{where}: {reason}")


class DegenerateGroupError(AuditError):
    """A group metric has no variability, so the allocation or size is undefined."""


class InfeasibleDesignError(AuditError):
    """The requested design cannot be met (e.g. tau <= u_tol)."""


class DegenerateDataError(AuditError):
    """Observed data give a zero standard error; the test statistic is undefined."""


class UnreliableEstimateError(AuditError):
    """Too many Monte Carlo replicates produced undefined metric estimates."""
