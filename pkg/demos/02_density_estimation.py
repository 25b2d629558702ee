"""Monte Carlo density estimates against closed-form references.

Three laws with known densities anchor the estimators: X1 (standard normal),
X1^2 (density e^{-x/2}/sqrt(2 pi x), singular at 0), and X1*X2 (a Bessel-type
density, log-singular at 0).  Histograms and Gaussian-kernel estimates are
compared to cell-averaged closed forms in L1.
"""

import numpy as np

import polygauss as pg

N = 400_000
cases = [
    ("normal", pg.monomial(1, (1,)), "normal"),
    ("square", pg.monomial(1, (2,)), "chisq1"),
    ("product", pg.monomial(2, (1, 1)), "product_normal"),
]

for name, f, kind in cases:
    s = pg.sample(f, N, seed=42)
    hist = pg.histogram_density(s, 400)
    oracle = pg.oracle_density(kind, hist.lo, hist.hi, hist.size)
    l1_hist = hist.step * np.abs(hist.values - oracle.values).sum()
    line = f"{name:8s} histogram L1 error {l1_hist:.4f}"
    if kind == "normal":
        kde = pg.kde_density(s, 400)
        ok = pg.oracle_density(kind, kde.lo, kde.hi, kde.size)
        l1_kde = kde.step * np.abs(kde.values - ok.values).sum()
        line += f"   kde L1 error {l1_kde:.4f} (bandwidth {kde.bandwidth:.4f})"
    print(line)
    print(f"{'':8s} grid [{hist.lo:+.2f}, {hist.hi:+.2f}] step {hist.step:.4f} "
          f"mass {hist.mass:.4f} clipped {hist.clipped_mass:.1e} "
          f"noise estimate {hist.l1_noise:.4f}")

# the kernel estimate stays finite at the chi-square singularity
s = pg.sample(pg.monomial(1, (2,)), N, seed=42)
kde = pg.kde_density(s, 400)
print("\nkernel estimate near the x^2 singularity stays finite:",
      np.all(np.isfinite(kde.values)), "- smoothing bias is the price")

# empirical CDF interval probabilities
cdf = pg.ecdf(s)
print("P(X^2 in (0, 1]) empirical:", round(cdf.interval_prob(0.0, 1.0), 4),
      "(exact 0.6827)")
