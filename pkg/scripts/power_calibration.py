"""Simulated rejection rates at the designed sample size, under the alternative and at the null boundary."""

import argparse

from fairaudit import (
    AuditDesignInput,
    GroupRates,
    PopulationSpec,
    SimConfig,
    achieved_power,
    metric_value,
    run_replicates,
    sample_size,
)

SCENARIOS = [
    ("DP", GroupRates.for_positive_rate(0.4404), GroupRates.for_positive_rate(0.3478)),
    ("TPR", GroupRates(0.35, 0.79, 0.88), GroupRates(0.22, 0.68, 0.91)),
    ("TNR", GroupRates(0.30, 0.75, 0.92), GroupRates(0.25, 0.75, 0.86)),
    ("PPV", GroupRates(0.5, 0.8, 0.6), GroupRates(0.4, 0.7, 0.7)),
    ("NPV", GroupRates(0.3, 0.85, 0.9), GroupRates(0.3, 0.7, 0.9)),
    ("ACC", GroupRates(0.4, 0.8, 0.85), GroupRates(0.4, 0.75, 0.8)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replicates", type=int, default=10_000)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--beta", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'metric':6} {'U':>7} {'n':>6} {'pred.power':>10} {'sim.power':>9} {'sim.null':>8} {'undef':>5}")
    for kind, r1, r2 in SCENARIOS:
        u = metric_value(kind, r1) - metric_value(kind, r2)
        d = sample_size(AuditDesignInput(kind, args.alpha, args.beta, 0.0, u, r1, r2))
        pop = PopulationSpec(r1, r2)
        alt = run_replicates(
            SimConfig(pop, kind, d.n1, d.n2, args.replicates, args.seed, args.alpha, 0.0), workers=args.workers
        )
        null = run_replicates(
            SimConfig(pop, kind, d.n1, d.n2, args.replicates, args.seed + 1, args.alpha, u), workers=args.workers
        )
        pred = achieved_power(kind, args.alpha, 0.0, u, r1, r2, d.n1, d.n2)
        print(
            f"{kind:6} {u:7.4f} {d.n_total:6d} {pred:10.4f} {alt.rejection_rate:9.4f} "
            f"{null.rejection_rate:8.4f} {alt.undefined_replicates + null.undefined_replicates:5d}"
        )
    print(f"null-boundary reference: alpha/2 = {args.alpha / 2}")


if __name__ == "__main__":
    main()
