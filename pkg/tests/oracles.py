"""Reference computations that share no code with the package under test."""

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def phi_ref(x) -> float:
    return float(mp.erfc(-mp.mpf(x) / mp.sqrt(2)) / 2)


def quantile_bisect(p, lo=-40.0, hi=40.0, iters=200) -> float:
    """Standard normal quantile by bisection on the high-precision CDF."""
    p = mp.mpf(p)
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    for _ in range(iters):
        mid = (lo + hi) / 2
        if mp.erfc(-mid / mp.sqrt(2)) / 2 < p:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def cells(prevalence, tpr, tnr):
    """(tp, fp, fn, tn) cell probabilities."""
    return np.array(
        [prevalence * tpr, (1 - prevalence) * (1 - tnr), prevalence * (1 - tpr), (1 - prevalence) * tnr]
    )


# metric as a function of the four cell fractions (tp, fp, fn, tn)
METRIC_OF_CELLS = {
    "DP": lambda c: c[0] + c[1],
    "ACC": lambda c: c[0] + c[3],
    "TPR": lambda c: c[0] / (c[0] + c[2]),
    "FNR": lambda c: c[2] / (c[0] + c[2]),
    "TNR": lambda c: c[3] / (c[3] + c[1]),
    "FPR": lambda c: c[1] / (c[3] + c[1]),
    "PPV": lambda c: c[0] / (c[0] + c[1]),
    "NPV": lambda c: c[3] / (c[3] + c[2]),
}


def multinomial_delta_variance(metric, prevalence, tpr, tnr, h=1e-6) -> float:
    """Delta-method variance on the full 4-cell multinomial with a central-difference gradient."""
    p = cells(prevalence, tpr, tnr)
    f = METRIC_OF_CELLS[metric]
    grad = np.zeros(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = h
        grad[i] = (f(p + e) - f(p - e)) / (2 * h)
    cov = np.diag(p) - np.outer(p, p)
    return float(grad @ cov @ grad)


def eq2_n(s1, s2, p1, delta, z):
    return z * z * (s1**2 / p1 + s2**2 / (1 - p1)) / delta**2
