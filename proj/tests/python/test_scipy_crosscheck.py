"""Optional cross-validation of the correlation engine against scipy.

Coefficients must agree to float precision; p-values must agree once
scipy is told to use the same methods (t approximation for r and rho,
asymptotic normal approximation for tau-b). Skips silently when scipy
is not installed.
"""

import sys

import mtdiag

try:
    import numpy as np
    from scipy import stats
except ImportError:
    print("scipy not available; cross-check skipped")
    sys.exit(0)


def main():
    rng = np.random.default_rng(988)
    checked = 0
    for trial in range(300):
        n = int(rng.integers(3, 150))
        x = rng.normal(size=n) if trial % 2 else rng.integers(0, 7, size=n).astype(float)
        y = rng.normal(size=n) if trial % 3 else rng.integers(0, 7, size=n).astype(float)
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        r, p_r = mtdiag.pearson(list(x), list(y))
        rho, p_rho = mtdiag.spearman(list(x), list(y))
        tau, p_tau = mtdiag.kendall(list(x), list(y))

        ref_r = stats.pearsonr(x, y)
        ref_rho = stats.spearmanr(x, y)
        ref_tau = stats.kendalltau(x, y, method="asymptotic")

        assert abs(r - ref_r.statistic) < 1e-12, (trial, r, ref_r.statistic)
        assert abs(rho - ref_rho.statistic) < 1e-12, (trial, rho, ref_rho.statistic)
        assert abs(tau - ref_tau.statistic) < 1e-12, (trial, tau, ref_tau.statistic)
        assert abs(p_r - ref_r.pvalue) < 1e-10, (trial, p_r, ref_r.pvalue)
        assert abs(p_rho - ref_rho.pvalue) < 1e-10, (trial, p_rho, ref_rho.pvalue)
        assert abs(p_tau - ref_tau.pvalue) < 1e-10, (trial, p_tau, ref_tau.pvalue)
        checked += 1

    assert checked > 250, checked
    print(f"cross-checked {checked} random samples against scipy")


if __name__ == "__main__":
    main()
