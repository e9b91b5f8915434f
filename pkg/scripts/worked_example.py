"""Sample sizes for the DP income-model example, with the arithmetic spelled out."""

import argparse
import math

from fairaudit import AuditDesignInput, GroupRates, group_variance, sample_size


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rate1", type=float, default=0.3478, help="positive-prediction rate, group 1")
    ap.add_argument("--rate2", type=float, default=0.4404, help="positive-prediction rate, group 2")
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--beta", type=float, default=0.2)
    args = ap.parse_args()

    r1, r2 = GroupRates.for_positive_rate(args.rate1), GroupRates.for_positive_rate(args.rate2)
    v1, v2 = group_variance("DP", r1), group_variance("DP", r2)
    print(f"group variances: {v1:.4f} {v2:.4f}")
    print(f"{'tau':>8} {'n_real':>10} {'n':>6} {'n1':>6} {'n2':>6} {'p1':>7}")
    for tau in (abs(args.rate2 - args.rate1), 0.093, 0.09):
        out = sample_size(AuditDesignInput("DP", args.alpha, args.beta, 0.0, tau, r1, r2))
        print(f"{tau:8.4f} {out.n_real:10.2f} {out.n_total:6d} {out.n1:6d} {out.n2:6d} {out.p1:7.4f}")
    z = 1.959964 + 0.841621
    print(f"rounded-input check: {(z * (math.sqrt(0.227) + math.sqrt(0.246)) / 0.093) ** 2:.1f}")


if __name__ == "__main__":
    main()
