"""Decay of empirical characteristic functions of polynomial images.

For a polynomial with per-variable power cap m, degree d and leading
magnitude a, the characteristic-function modulus decays like

    |E exp(i t f(X))|  <=  C(m, d) |a t|^(-1/m) (|ln|a t||^(d-m) + 1)

with a constant that does not grow with the number of variables; the older
dimension-dependent bound carries the log exponent (3n - d/m)/2 - 1 instead.
Three closed forms anchor the estimator: |phi(t)| equals e^{-t^2/2} for X1,
(1 + 4t^2)^{-1/4} for X1^2, and (1 + t^2)^{-1/2} for X1*X2.
"""

import numpy as np

import polygauss as pg

N = 400_000
cases = [
    ("x1", pg.monomial(1, (1,)), lambda t: np.exp(-t**2 / 2), 1, 1),
    ("x1^2", pg.monomial(1, (2,)), lambda t: (1 + 4 * t**2) ** -0.25, 2, 2),
    ("x1*x2", pg.monomial(2, (1, 1)), lambda t: (1 + t**2) ** -0.5, 1, 2),
]

for name, f, exact, m, d in cases:
    s = pg.sample(f, N, seed=11)
    curve = pg.ecf_modulus(s, pg.default_t_grid(0.1, 1e3, 8))
    worst = np.abs(curve.modulus - exact(curve.t))[curve.modulus > 0.01].max()
    rep = pg.cf_decay_check(curve, pg.EnvelopeParams(m=m, d=d))
    slope = rep.extras["ratio_slope"]
    trend = f"{slope:+.3f}" if slope is not None else "skipped"
    print(f"{name:6s} worst |ecf - exact| {worst:.4f}   "
          f"decay check {'pass' if rep.verdict else 'FAIL'} "
          f"(fitted constant {rep.fitted_constant:.3f}, ratio trend {trend})")

p = pg.EnvelopeParams(m=1, d=2)
for n in (2, 5, 10):
    new, old = pg.decay_exponents(p, n)
    print(f"n={n:2d}: structure-aware log exponent {new:g}, "
          f"dimension-dependent {old:g}")
print("\nthe structure-aware exponent d - m never grows with dimension.")
