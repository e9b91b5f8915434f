"""``fairaudit`` command line: design, test, simulate, curve.

Config files are TOML.  Top-level keys hold the test parameters, the two
groups are given as ``[group1]`` (privileged) and ``[group2]`` sections, and
``[simulate]`` holds Monte Carlo settings::

    metric = "DP"
    alpha = 0.05
    beta = 0.2
    u_tol = 0.0
    tau = 0.093
    # allocation = 0.5          # fraction of the sample in group 1; default Neyman

    [group1]
    label = "privileged"        # optional, echoed in reports
    prevalence = 0.4            # either prevalence + tpr + tnr ...
    tpr = 0.79
    tnr = 0.85

    [group2]
    positive_pred_rate = 0.35   # ... or, for DP only, the positive-prediction rate

Instead of the two group sections a ``[pilot]`` section may point at an audit
CSV (``path``, ``privileged_group``, optional ``versus``) whose empirical
rates are used.

Exit codes: 0 success, 2 config/validation error, 3 data error,
4 infeasible design, 5 degenerate statistics.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from fairaudit.confusion import GroupRates, MetricKind, metric_value, rates_from_counts
from fairaudit.design import AuditDesignInput, achieved_power, power_curve, sample_size
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
from fairaudit.hypotest import run_test
from fairaudit.io import (
    ConfigError,
    DataError,
    ReportDocument,
    group_labels,
    read_audit_csv,
    tally,
    write_curve_csv,
)
from fairaudit.simulate import PopulationSpec, SimConfig, run_replicates
from fairaudit.variance import group_variance

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INFEASIBLE = 4
EXIT_DEGENERATE = 5


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, InfeasibleDesignError):
        return EXIT_INFEASIBLE
    if isinstance(exc, (DegenerateGroupError, DegenerateDataError, UndefinedMetricError, UnreliableEstimateError)):
        return EXIT_DEGENERATE
    if isinstance(exc, DataError):
        return EXIT_DATA
    return EXIT_CONFIG


# -- config -----------------------------------------------------------------


def load_config(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        cfg = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path.name}: {exc}") from None
    cfg["_dir"] = path.parent
    return cfg


def _get(cfg: dict, key: str, kind, section: str = "", default=...):
    where = f"[{section}].{key}" if section else key
    if key not in cfg:
        if default is ...:
            raise ConfigError(f"missing config key {where}")
        return default
    v = cfg[key]
    if kind is float and isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if kind is int and isinstance(v, int) and not isinstance(v, bool):
        return v
    if kind is str and isinstance(v, str):
        return v
    raise ConfigError(f"config key {where} must be of type {kind.__name__}, got {v!r}")


def _apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    cfg = dict(cfg)
    for key in ("metric", "alpha", "beta", "u_tol", "tau"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _group_rates(section: dict, name: str, metric: MetricKind) -> GroupRates:
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    try:
        if "prevalence" in section:
            unknown = set(section) - {"prevalence", "tpr", "tnr", "label"}
            if unknown:
                raise ConfigError(f"[{name}]: unexpected keys {sorted(unknown)}")
            return GroupRates(
                _get(section, "prevalence", float, name),
                _get(section, "tpr", float, name),
                _get(section, "tnr", float, name),
            )
        if "positive_pred_rate" in section:
            if metric is not MetricKind.DP:
                raise ConfigError(
                    f"[{name}]: positive_pred_rate alone only determines DP; "
                    f"{metric.value} needs prevalence, tpr and tnr"
                )
            return GroupRates.for_positive_rate(_get(section, "positive_pred_rate", float, name))
    except ContractError as exc:
        raise ConfigError(f"[{name}]: {exc}") from None
    raise ConfigError(f"[{name}] needs prevalence/tpr/tnr or positive_pred_rate")


def _pick_pair(labels: list[str], privileged: str | None, versus: str | None) -> tuple[str, str]:
    if privileged is None:
        raise ConfigError("the privileged group must be designated explicitly (--privileged-group)")
    if privileged not in labels:
        raise DataError(f"privileged group {privileged!r} not found; groups present: {labels}")
    others = [g for g in labels if g != privileged]
    if versus is not None:
        if versus not in others:
            raise DataError(f"comparison group {versus!r} not found; groups present: {labels}")
        return privileged, versus
    if len(others) != 1:
        raise DataError(
            f"expected exactly two groups, found {len(labels)} ({labels}); "
            "choose the comparison group with --versus"
        )
    return privileged, others[0]


def _design_groups(cfg: dict, metric: MetricKind) -> tuple[GroupRates, GroupRates, dict, list[str]]:
    """Rates for both groups plus an echo of where they came from."""
    if "pilot" in cfg:
        pilot = cfg["pilot"]
        path = Path(cfg["_dir"]) / _get(pilot, "path", str, "pilot")
        records, warnings = read_audit_csv(path, require_labels=metric.needs_labels)
        g1, g2 = _pick_pair(
            group_labels(records),
            _get(pilot, "privileged_group", str, "pilot", None),
            _get(pilot, "versus", str, "pilot", None),
        )
        c1, c2 = tally(records, g1), tally(records, g2)
        echo = {
            "pilot": {
                "path": path.name,
                "group1": {"label": g1, **asdict(c1)},
                "group2": {"label": g2, **asdict(c2)},
            }
        }
        return rates_from_counts(c1), rates_from_counts(c2), echo, warnings
    for name in ("group1", "group2"):
        if name not in cfg:
            raise ConfigError(f"config needs [{name}] (or a [pilot] section)")
    r1 = _group_rates(cfg["group1"], "group1", metric)
    r2 = _group_rates(cfg["group2"], "group2", metric)
    echo = {name: {k: v for k, v in cfg[name].items()} for name in ("group1", "group2")}
    return r1, r2, echo, []


def _metric(cfg: dict) -> MetricKind:
    try:
        return MetricKind.parse(_get(cfg, "metric", str))
    except ContractError as exc:
        raise ConfigError(str(exc)) from None


def _design_input(cfg: dict) -> tuple[AuditDesignInput, dict, list[str]]:
    metric = _metric(cfg)
    r1, r2, echo, warnings = _design_groups(cfg, metric)
    try:
        inp = AuditDesignInput(
            metric=metric,
            alpha=_get(cfg, "alpha", float),
            beta=_get(cfg, "beta", float),
            u_tol=_get(cfg, "u_tol", float, default=0.0),
            tau=_get(cfg, "tau", float),
            rates_g1=r1,
            rates_g2=r2,
            allocation=_get(cfg, "allocation", float, default=None),
        )
    except ContractError as exc:
        raise ConfigError(str(exc)) from None
    echo.update(
        metric=metric.value, alpha=inp.alpha, beta=inp.beta, u_tol=inp.u_tol, tau=inp.tau, allocation=inp.allocation
    )
    return inp, echo, warnings


# -- commands ---------------------------------------------------------------


def cmd_design(args: argparse.Namespace) -> ReportDocument:
    cfg = _apply_overrides(load_config(args.config), args)
    inp, echo, warnings = _design_input(cfg)
    out = sample_size(inp)
    outputs = out.as_dict()
    outputs["sigma2_g1"] = out.sigma_g1**2
    outputs["sigma2_g2"] = out.sigma_g2**2
    return ReportDocument("design", echo, outputs, warnings)


def cmd_test(args: argparse.Namespace) -> ReportDocument:
    cfg = _apply_overrides(load_config(args.config) if args.config else {}, args)
    for key, default in (("alpha", 0.05), ("u_tol", 0.0)):
        cfg.setdefault(key, default)
    if "metric" not in cfg:
        raise ConfigError("--metric is required")
    metric = _metric(cfg)
    alpha = _get(cfg, "alpha", float)
    u_tol = _get(cfg, "u_tol", float)
    section = cfg.get("test", {})
    privileged = args.privileged_group or section.get("privileged_group")
    versus = args.versus or section.get("versus")

    path = Path(args.data)
    records, warnings = read_audit_csv(path, require_labels=metric.needs_labels)
    g1, g2 = _pick_pair(group_labels(records), privileged, versus)
    c1, c2 = tally(records, g1), tally(records, g2)
    try:
        outcome = run_test(metric, c1, c2, u_tol, alpha)
    except UndefinedMetricError as exc:
        label = {"group1": g1, "group2": g2}.get(exc.group, exc.group)
        raise UndefinedMetricError(exc.metric, exc.reason, group=label) from None
    except ContractError as exc:
        raise ConfigError(str(exc)) from None
    outputs = outcome.as_dict()
    outputs["counts"] = {"group1": asdict(c1), "group2": asdict(c2)}
    inputs = {
        "data": path.name,
        "data_sha256": hashlib.sha256(path.read_bytes()).hexdigest(),
        "metric": metric.value,
        "alpha": alpha,
        "u_tol": u_tol,
        "group1": g1,
        "group2": g2,
    }
    return ReportDocument("test", inputs, outputs, warnings)


def cmd_simulate(args: argparse.Namespace) -> ReportDocument:
    cfg = _apply_overrides(load_config(args.config), args)
    metric = _metric(cfg)
    sim = dict(cfg.get("simulate", {}))
    if args.seed is not None:
        sim["seed"] = args.seed
    if args.replicates is not None:
        sim["replicates"] = args.replicates
    if args.workers is not None:
        sim["workers"] = args.workers

    r1, r2, echo, warnings = _design_groups(cfg, metric)
    alpha = _get(cfg, "alpha", float)
    u_tol = _get(cfg, "u_tol", float, default=0.0)
    true_u = metric_value(metric, r1) - metric_value(metric, r2)

    n1 = _get(sim, "n1", int, "simulate", None)
    n2 = _get(sim, "n2", int, "simulate", None)
    designed = None
    if n1 is None or n2 is None:
        tau = _get(cfg, "tau", float, default=true_u)
        try:
            inp = AuditDesignInput(metric, alpha, _get(cfg, "beta", float), u_tol, tau, r1, r2)
        except ContractError as exc:
            raise ConfigError(str(exc)) from None
        designed = sample_size(inp)
        n1, n2 = designed.n1, designed.n2

    try:
        sc = SimConfig(
            population=PopulationSpec(r1, r2),
            metric=metric,
            n1=n1,
            n2=n2,
            replicates=_get(sim, "replicates", int, "simulate"),
            master_seed=_get(sim, "seed", int, "simulate"),
            alpha=alpha,
            u_tol=u_tol,
        )
    except ContractError as exc:
        raise ConfigError(str(exc)) from None
    workers = _get(sim, "workers", int, "simulate", 1)
    res = run_replicates(sc, workers=workers)

    outputs = res.as_dict()
    outputs.update(
        n1=n1,
        n2=n2,
        true_unfairness=true_u,
        sigma2_g1=group_variance(metric, r1),
        sigma2_g2=group_variance(metric, r2),
        predicted_rejection_rate=achieved_power(metric, alpha, u_tol, true_u, r1, r2, n1, n2),
    )
    if designed is not None:
        outputs["design"] = designed.as_dict()
    if res.undefined_replicates:
        warnings.append(f"{res.undefined_replicates} replicate(s) had an undefined {metric.value} test and were excluded")
    echo.update(metric=metric.value, alpha=alpha, u_tol=u_tol, seed=sc.master_seed, replicates=sc.replicates)
    if designed is not None:
        echo.update(tau=inp.tau, beta=inp.beta)
    return ReportDocument("simulate", echo, outputs, warnings)


def cmd_curve(args: argparse.Namespace) -> ReportDocument:
    if args.steps < 2:
        raise ConfigError("--steps must be at least 2")
    if args.n_min >= args.n_max:
        raise ConfigError("--n-min must be smaller than --n-max")
    if args.n_min < 2:
        raise ConfigError("--n-min must be at least 2")
    if args.steps > args.n_max - args.n_min + 1:
        raise ConfigError("--steps exceeds the number of distinct sizes in [n-min, n-max]")
    cfg = _apply_overrides(load_config(args.config), args)
    inp, echo, warnings = _design_input(cfg)
    grid = np.rint(np.linspace(args.n_min, args.n_max, args.steps)).astype(int).tolist()
    rows = power_curve(inp.metric, inp.alpha, inp.u_tol, inp.tau, inp.rates_g1, inp.rates_g2, grid, inp.allocation)
    write_curve_csv(args.out, rows)
    echo.update(n_min=args.n_min, n_max=args.n_max, steps=args.steps)
    target = 1.0 - inp.beta
    crossing = next((n for n, p in rows if p >= target), None)
    outputs = {"out": Path(args.out).name, "rows": len(rows), "first_n_reaching_target_power": crossing}
    return ReportDocument("curve", echo, outputs, warnings)


# -- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairaudit", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="write the report to this file instead of stdout"):
        sp.add_argument("--metric", help="DP, TPR, FNR, TNR, FPR, PPV, NPV or ACC")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--u-tol", dest="u_tol", type=float)
        sp.add_argument("--json", action="store_true", help="machine-readable JSON report")
        sp.add_argument("--out", help=out_help)

    d = sub.add_parser("design", help="required sample size and allocation")
    d.add_argument("config")
    common(d)
    d.add_argument("--beta", type=float)
    d.add_argument("--tau", type=float)
    d.set_defaults(func=cmd_design)

    t = sub.add_parser("test", help="run the unfairness test on an audit CSV")
    t.add_argument("data")
    common(t)
    t.add_argument("--config", help="optional TOML supplying metric/alpha/u_tol and [test] groups")
    t.add_argument("--privileged-group", dest="privileged_group")
    t.add_argument("--versus", help="comparison group when the file has more than two groups")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("simulate", help="Monte Carlo rejection rate and variances")
    s.add_argument("config")
    common(s)
    s.add_argument("--beta", type=float)
    s.add_argument("--tau", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--replicates", type=int)
    s.add_argument("--workers", type=int)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("curve", help="power as a function of total sample size")
    c.add_argument("config")
    common(c, out_help="CSV file receiving n,power rows")
    c.add_argument("--beta", type=float)
    c.add_argument("--tau", type=float)
    c.add_argument("--n-min", dest="n_min", type=int, required=True)
    c.add_argument("--n-max", dest="n_max", type=int, required=True)
    c.add_argument("--steps", type=int, required=True)
    c.set_defaults(func=cmd_curve)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "curve" and not args.out:
        parser.error("curve requires --out")
    try:
        report = args.func(args)
    except (AuditError, DomainError) as exc:
        print(f"fairaudit {args.command}: error: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    text = report.to_json() if args.json else report.to_text()
    if args.out and args.command != "curve":
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"fairaudit {args.command}: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_DATA
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
