"""Sample size, Neyman allocation and power for a two-group unfairness test.

The test rejects ``U <= u_tol`` when ``(U_hat - u_tol) / se > z(1 - alpha/2)``.
For a presumed unfairness ``tau > u_tol`` the required total size at a group-1
fraction ``p1`` is::

    n = (z(1-alpha/2) + z(1-beta))**2 * (s1**2 / p1 + s2**2 / (1 - p1)) / (tau - u_tol)**2

which is minimized by ``p1 = s1 / (s1 + s2)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

from fairaudit.confusion import GroupRates, MetricKind
from fairaudit.errors import ContractError, DegenerateGroupError, InfeasibleDesignError
from fairaudit.statsmath import check_probability as _check_prob
from fairaudit.statsmath import normal_cdf, normal_quantile
from fairaudit.variance import group_variance, unfairness_variance


@dataclass(frozen=True)
class AuditDesignInput:
    metric: MetricKind
    alpha: float
    beta: float
    u_tol: float
    tau: float
    rates_g1: GroupRates
    rates_g2: GroupRates
    allocation: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "metric", MetricKind.parse(self.metric))
        _check_prob("alpha", self.alpha)
        _check_prob("beta", self.beta)
        if self.allocation is not None:
            _check_prob("allocation", self.allocation)
        if not math.isfinite(self.tau) or not math.isfinite(self.u_tol):
            raise ContractError("tau and u_tol must be finite")
        if self.u_tol < 0:
            raise ContractError(f"u_tol must be non-negative, got {self.u_tol}")


@dataclass(frozen=True)
class AuditDesignOutput:
    n_total: int
    n1: int
    n2: int
    p1: float
    n_real: float
    sigma_g1: float
    sigma_g2: float
    z_alpha: float
    z_beta: float
    power: float

    def as_dict(self) -> dict:
        return asdict(self)


def critical_values(alpha: float, beta: float) -> tuple[float, float]:
    """(z(1 - alpha/2), z(1 - beta))."""
    return normal_quantile(1.0 - alpha / 2.0), normal_quantile(1.0 - beta)


def optimal_allocation(sigma_g1: float, sigma_g2: float) -> float:
    """Neyman allocation: the fraction of the sample assigned to group 1."""
    if sigma_g1 < 0 or sigma_g2 < 0:
        raise ContractError("standard deviations must be non-negative")
    if sigma_g1 == 0.0 or sigma_g2 == 0.0:
        raise DegenerateGroupError(
            f"allocation undefined: group standard deviations are ({sigma_g1}, {sigma_g2})"
        )
    return sigma_g1 / (sigma_g1 + sigma_g2)


def sample_size_real(
    sigma_g1: float, sigma_g2: float, delta: float, z_alpha: float, z_beta: float, p1: float | None = None
) -> float:
    """Unrounded total sample size for effect ``delta = tau - u_tol``.

    With ``p1=None`` the optimal-allocation closed form is used, which also
    covers a single zero-variance group.
    """
    if delta <= 0:
        raise InfeasibleDesignError(f"tau - u_tol must be positive, got {delta}")
    if sigma_g1 == 0.0 and sigma_g2 == 0.0:
        raise DegenerateGroupError("metric has zero variance in both groups")
    z = z_alpha + z_beta
    if p1 is None:
        return (z * (sigma_g1 + sigma_g2) / delta) ** 2
    return z * z * (sigma_g1**2 / p1 + sigma_g2**2 / (1.0 - p1)) / delta**2


def _power_from_variance(delta: float, sigma2_u: float, z_alpha: float) -> float:
    if sigma2_u == 0.0:
        raise DegenerateGroupError("unfairness estimate has zero variance")
    return normal_cdf(delta / math.sqrt(sigma2_u) - z_alpha)


def _split(n_total: int, p1: float) -> tuple[int, int]:
    n1 = min(max(round(p1 * n_total), 1), n_total - 1)
    return n1, n_total - n1


def sample_size(inp: AuditDesignInput) -> AuditDesignOutput:
    """Minimum total size and its split between groups for the requested power.

    ``n_total = ceil(n_real)`` and ``n1 = round(p1 * n_real)`` clamped to
    ``[1, n_total - 1]``.  If that integer split falls short of the target
    power, the group left below its real-valued size gets one more unit, so
    ``n_total`` may exceed ``ceil(n_real)`` by one.
    """
    delta = inp.tau - inp.u_tol
    if delta <= 0:
        raise InfeasibleDesignError(f"tau ({inp.tau}) must exceed u_tol ({inp.u_tol})")
    z_a, z_b = critical_values(inp.alpha, inp.beta)
    s1 = math.sqrt(group_variance(inp.metric, inp.rates_g1))
    s2 = math.sqrt(group_variance(inp.metric, inp.rates_g2))
    if s1 == 0.0 and s2 == 0.0:
        raise DegenerateGroupError(f"{inp.metric.value} has zero variance in both groups")

    if inp.allocation is None:
        p1 = s1 / (s1 + s2)
        n_real = sample_size_real(s1, s2, delta, z_a, z_b)
    else:
        p1 = inp.allocation
        n_real = sample_size_real(s1, s2, delta, z_a, z_b, p1)

    n_total = max(math.ceil(n_real), 2)
    n1 = min(max(round(p1 * n_real), 1), n_total - 1)
    n2 = n_total - n1
    power = _power_from_variance(delta, s1**2 / n1 + s2**2 / n2, z_a)
    if power < 1.0 - inp.beta:
        # at most one group sits below its real-valued size; top it up
        if n1 < p1 * n_real:
            n1 += 1
        else:
            n2 += 1
        power = _power_from_variance(delta, s1**2 / n1 + s2**2 / n2, z_a)
    return AuditDesignOutput(
        n_total=n1 + n2,
        n1=n1,
        n2=n2,
        p1=p1,
        n_real=n_real,
        sigma_g1=s1,
        sigma_g2=s2,
        z_alpha=z_a,
        z_beta=z_b,
        power=power,
    )


def achieved_power(
    metric: MetricKind | str,
    alpha: float,
    u_tol: float,
    tau: float,
    rates_g1: GroupRates,
    rates_g2: GroupRates,
    n1: int,
    n2: int,
) -> float:
    """Asymptotic power of the test with group sizes ``n1``, ``n2`` when ``U = tau``."""
    _check_prob("alpha", alpha)
    z_a = normal_quantile(1.0 - alpha / 2.0)
    uv = unfairness_variance(metric, rates_g1, rates_g2, n1, n2)
    return _power_from_variance(tau - u_tol, uv.sigma2_U, z_a)


def power_curve(
    metric: MetricKind | str,
    alpha: float,
    u_tol: float,
    tau: float,
    rates_g1: GroupRates,
    rates_g2: GroupRates,
    n_grid: Sequence[int],
    allocation: float | None = None,
) -> list[tuple[int, float]]:
    """Power at each total size in ``n_grid``, splitting by ``allocation`` (Neyman if None)."""
    grid = [int(n) for n in n_grid]
    if not grid:
        raise ContractError("n_grid must not be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ContractError("n_grid must be strictly ascending")
    if grid[0] < 2:
        raise ContractError("every grid size must be at least 2 (one unit per group)")
    if tau < u_tol:
        raise InfeasibleDesignError(f"tau ({tau}) is below u_tol ({u_tol})")
    if allocation is None:
        s1 = math.sqrt(group_variance(metric, rates_g1))
        s2 = math.sqrt(group_variance(metric, rates_g2))
        if s1 == 0.0 and s2 == 0.0:
            raise DegenerateGroupError("metric has zero variance in both groups")
        allocation = s1 / (s1 + s2)
    else:
        _check_prob("allocation", allocation)
    out = []
    for n in grid:
        n1, n2 = _split(n, allocation)
        out.append((n, achieved_power(metric, alpha, u_tol, tau, rates_g1, rates_g2, n1, n2)))
    return out
