"""Monte Carlo oracle for the variance, size and power formulas.

Random streams
--------------
Every draw uses a Philox-4x64 generator (counter based, period 2**256) keyed
by ``numpy.random.SeedSequence(entropy=master_seed, spawn_key=key)``:

* ``run_replicates`` uses ``key = (replicate_index, group_index)`` with group
  index 0 for group 1 and 1 for group 2;
* ``empirical_variance_check`` draws all replicates from a single stream with
  ``key = ()``.

Because each replicate owns its stream, results do not depend on how the
replicates are split across worker processes.

A group sample of size ``n`` is the tally of ``n`` independent draws with
``Y ~ Bernoulli(prevalence)`` and ``Y_hat | Y`` Bernoulli with success
``tpr`` (Y=1) or ``1 - tnr`` (Y=0); the tally is drawn directly from the
equivalent four-cell multinomial.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from fairaudit.confusion import ConfusionCounts, GroupRates, MetricKind
from fairaudit.errors import (
    ContractError,
    DegenerateDataError,
    UndefinedMetricError,
    UnreliableEstimateError,
)
from fairaudit.hypotest import run_test
from fairaudit.statsmath import check_probability as _check_prob

def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not (0 <= seed < 2**64):
        raise ContractError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def make_rng(master_seed: int, key: tuple[int, ...] = ()) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=_check_seed(master_seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return make_rng(seed)


def _pvals(r: GroupRates) -> np.ndarray:
    p = np.array(r.cell_fractions(), dtype=float)
    return p / p.sum()


def draw_group_sample(r: GroupRates, n: int, seed) -> ConfusionCounts:
    """Confusion counts of ``n`` independent draws from a group with rates ``r``."""
    if n < 1:
        raise ContractError(f"sample size must be >= 1, got {n}")
    tp, fp, fn, tn = _as_rng(seed).multinomial(int(n), _pvals(r))
    return ConfusionCounts(int(tp), int(fp), int(fn), int(tn))


def metric_estimates(kind: MetricKind | str, counts: np.ndarray) -> np.ndarray:
    """Vectorized metric estimates from an ``(..., 4)`` array of (tp, fp, fn, tn).

    Undefined estimates (empty denominators) are NaN.
    """
    kind = MetricKind.parse(kind)
    c = np.asarray(counts, dtype=float)
    tp, fp, fn, tn = c[..., 0], c[..., 1], c[..., 2], c[..., 3]
    n = tp + fp + fn + tn
    num, den = {
        MetricKind.DP: (tp + fp, n),
        MetricKind.ACC: (tp + tn, n),
        MetricKind.TPR: (tp, tp + fn),
        MetricKind.FNR: (fn, tp + fn),
        MetricKind.TNR: (tn, tn + fp),
        MetricKind.FPR: (fp, tn + fp),
        MetricKind.PPV: (tp, tp + fp),
        MetricKind.NPV: (tn, tn + fn),
    }[kind]
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.nan)


def empirical_variance_check(
    kind: MetricKind | str, r: GroupRates, n: int, replicates: int, master_seed: int
) -> float:
    """``n`` times the sample variance of the metric estimate over replicates.

    Raises
    ------
    UnreliableEstimateError
        If more than half of the replicates give an undefined estimate.
    """
    if n < 1 or replicates < 2:
        raise ContractError("need n >= 1 and at least 2 replicates")
    rng = make_rng(master_seed)
    counts = rng.multinomial(int(n), _pvals(r), size=int(replicates))
    est = metric_estimates(kind, counts)
    ok = est[~np.isnan(est)]
    if ok.size * 2 < replicates or ok.size < 2:
        raise UnreliableEstimateError(
            f"{replicates - ok.size} of {replicates} replicates gave an undefined {MetricKind.parse(kind).value}"
        )
    return float(n * ok.var(ddof=1))


@dataclass(frozen=True)
class PopulationSpec:
    rates_g1: GroupRates
    rates_g2: GroupRates


@dataclass(frozen=True)
class SimConfig:
    population: PopulationSpec
    metric: MetricKind
    n1: int
    n2: int
    replicates: int
    master_seed: int
    alpha: float = 0.05
    u_tol: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "metric", MetricKind.parse(self.metric))
        if self.replicates < 1:
            raise ContractError(f"replicates must be >= 1, got {self.replicates}")
        if self.n1 < 1 or self.n2 < 1:
            raise ContractError(f"n1 and n2 must be >= 1, got {self.n1}, {self.n2}")
        _check_prob("alpha", self.alpha)
        _check_seed(self.master_seed)


@dataclass(frozen=True)
class SimResult:
    rejection_rate: float
    rejections: int
    mean_u_hat: float
    empirical_var_g1: float
    empirical_var_g2: float
    undefined_replicates: int
    replicates_used: int

    def as_dict(self) -> dict:
        return asdict(self)


def _replicate_block(cfg: SimConfig, start: int, stop: int) -> np.ndarray:
    """Rows of (defined, reject, m1_hat, m2_hat) for replicates in [start, stop)."""
    r1, r2 = cfg.population.rates_g1, cfg.population.rates_g2
    p1, p2 = _pvals(r1), _pvals(r2)
    out = np.zeros((stop - start, 4))
    for row, i in enumerate(range(start, stop)):
        c1 = ConfusionCounts(*(int(v) for v in make_rng(cfg.master_seed, (i, 0)).multinomial(cfg.n1, p1)))
        c2 = ConfusionCounts(*(int(v) for v in make_rng(cfg.master_seed, (i, 1)).multinomial(cfg.n2, p2)))
        try:
            res = run_test(cfg.metric, c1, c2, cfg.u_tol, cfg.alpha)
        except (UndefinedMetricError, DegenerateDataError):
            out[row] = (0.0, 0.0, np.nan, np.nan)
            continue
        out[row] = (1.0, float(res.reject), res.m1_hat, res.m2_hat)
    return out


def run_replicates(cfg: SimConfig, workers: int = 1) -> SimResult:
    """Simulate ``cfg.replicates`` independent audits and run the test on each.

    Replicates whose metric or standard error is undefined are excluded from
    every rate and counted in ``undefined_replicates``.
    """
    if workers < 1:
        raise ContractError("workers must be >= 1")
    if workers == 1 or cfg.replicates < 2 * workers:
        rows = _replicate_block(cfg, 0, cfg.replicates)
    else:
        edges = np.linspace(0, cfg.replicates, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_replicate_block, [cfg] * workers, edges[:-1], edges[1:]))
        rows = np.concatenate(parts)

    used = rows[rows[:, 0] == 1.0]
    n_used = used.shape[0]
    if n_used == 0:
        raise UnreliableEstimateError(
            f"all {cfg.replicates} replicates gave an undefined {cfg.metric.value} test"
        )
    rejections = int(used[:, 1].sum())
    m1, m2 = used[:, 2], used[:, 3]
    var1 = float(cfg.n1 * m1.var(ddof=1)) if n_used > 1 else math.nan
    var2 = float(cfg.n2 * m2.var(ddof=1)) if n_used > 1 else math.nan
    return SimResult(
        rejection_rate=rejections / n_used,
        rejections=rejections,
        mean_u_hat=float((m1 - m2).mean()),
        empirical_var_g1=var1,
        empirical_var_g2=var2,
        undefined_replicates=cfg.replicates - n_used,
        replicates_used=n_used,
    )
