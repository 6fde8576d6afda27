"""Regenerates the Friedman / Wilcoxon reference values with SciPy.

    python3 gen_stats_fixtures.py
"""
import numpy as np
from scipy import stats

rng = np.random.default_rng(20240611)

with open("friedman_fixtures.txt", "w") as f:
    f.write("# n k values(row-major) chi2 p\n")
    for case in range(100):
        n = int(rng.integers(3, 15))
        k = int(rng.integers(3, 6))
        v = rng.normal(size=(n, k)) + rng.normal(size=k) * 0.8
        if case % 3 == 0:
            v = np.round(v * 2) / 2  # ties
        chi2, p = stats.friedmanchisquare(*v.T)
        f.write(" ".join([str(n), str(k)] + [repr(float(x)) for x in v.ravel()] + [repr(float(chi2)), repr(float(p))]) + "\n")

with open("wilcoxon_fixtures.txt", "w") as f:
    f.write("# n x... y... w_plus p\n")
    for case in range(100):
        if case < 50:
            n = int(rng.integers(3, 13))
            x = rng.normal(size=n) + 0.4
            y = rng.normal(size=n)
            method = "exact"
        else:
            n = int(rng.integers(13, 60))
            x = rng.normal(size=n) + 0.3
            y = rng.normal(size=n)
            if case % 2 == 0:
                x = np.round(x * 2) / 2
                y = np.round(y * 2) / 2
                # keep more than 12 nonzero pairs so both sides use the normal approximation
                while np.count_nonzero(x - y) <= 12:
                    y = np.round((rng.normal(size=n)) * 2) / 2
            method = "approx"
        d = x - y
        nz = d[d != 0]
        ranks = stats.rankdata(np.abs(nz))
        w_plus = float(ranks[nz > 0].sum())
        res = stats.wilcoxon(x, y, zero_method="wilcox", correction=False, method=method)
        f.write(" ".join([str(n)] + [repr(float(a)) for a in x] + [repr(float(b)) for b in y]
                         + [repr(w_plus), repr(float(res.pvalue))]) + "\n")
