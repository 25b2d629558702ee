"""Regularity functionals of gridded densities and the inequality checks
built from them.

Two moduli of continuity are computed for a density rho:

* the shift modulus  omega(rho, eps) = sup_{|h| <= eps} int |rho(s+h) - rho(s)| ds,
  evaluated over integer multiples of the grid step (sub-grid shifts are
  below estimator resolution, hence the precondition eps >= 2 * step);

* the dual modulus  sigma(rho, eps) = sup { int phi' rho : |phi| <= eps,
  |phi'| <= 1 }, whose grid discretization is the chain LP of
  :mod:`polygauss.lp` and is solved exactly.

The two are equivalent up to fixed factors:

    omega(rho, 2 eps) / 2  <=  sigma(rho, eps)  <=  6 omega(rho, eps)

and for the image density of a non-constant polynomial with per-variable
power cap m, total degree d and leading magnitude a, the shift modulus obeys
a scaling law with envelope

    (eps / a)^(1/m) * ( |ln(eps/a)|^(d-m) + 1 )

up to a constant depending only on (m, d).  Distances between two densities
use the same machinery: total variation is the L1 distance (range [0, 2]);
the bounded-Lipschitz (Kantorovich-Rubinstein) distance is the chain LP with
unit box.  They are linked through

    d_TV <= 6 max(sigma_X(eps), sigma_Y(eps)) + d_KR / eps   for eps in (0,1)

which, combined with the envelope, bounds d_TV by a power of d_KR.  Every
numeric verdict carries an explicit error budget: twice the truncated tail
mass, plus a step * total-variation discretization proxy, plus the Monte
Carlo L1 noise estimate, scaled by the inequality's coefficients.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .density import GriddedDensity, EmpiricalCdf, resample_density
from .errors import (
    EpsilonBelowResolution,
    GridMismatch,
    InputError,
    NonpositiveDistance,
    ZeroVariance,
)
from .lp import solve_chain_lp


def _log_bracket(u: float, exponent: float) -> float:
    """The envelope bracket |ln u|^e + 1, with the whole log term dropping
    out when its exponent is zero (so the d = m envelope is a clean power)."""
    if exponent == 0:
        return 1.0
    return abs(math.log(u)) ** exponent + 1.0


# --- Curves and reports ------------------------------------------------------


@dataclass(frozen=True)
class ModulusCurve:
    """Finite table eps -> functional value, eps strictly increasing."""

    kind: str
    eps: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.eps, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if e.ndim != 1 or e.shape != v.shape or e.shape[0] == 0:
            raise InputError("curve needs matching nonempty eps/value arrays")
        if np.any(e <= 0) or np.any(np.diff(e) <= 0):
            raise InputError("eps values must be positive and strictly increasing")
        if np.any(v < 0) or np.any(v > 2.0 + 1e-6):
            raise InputError("modulus values must lie in [0, 2]")
        if np.any(np.diff(v) < -1e-9):
            raise InputError("modulus values must be nondecreasing in eps")
        e.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "eps", e)
        object.__setattr__(self, "values", v)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            fh.write("eps,value\n")
            for e, v in zip(self.eps, self.values):
                fh.write(f"{float(e):.17g},{float(v):.17g}\n")


@dataclass(frozen=True)
class EnvelopeParams:
    """Scaling-law parameters: power cap m, degree cap d, leading magnitude."""

    m: int
    d: int
    lead: float = 1.0

    def __post_init__(self) -> None:
        if not 1 <= self.m <= self.d:
            raise InputError(f"need 1 <= m <= d, got m={self.m}, d={self.d}")
        if not self.lead > 0:
            raise InputError(f"leading magnitude must be positive, got {self.lead}")


@dataclass(frozen=True)
class ProbeRow:
    eps: float
    lhs: float
    rhs: float
    budget: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.margin >= -self.budget


@dataclass(frozen=True)
class BoundReport:
    """Per-inequality verdict with probe table and fitted constant."""

    check_id: str
    rows: tuple[ProbeRow, ...]
    fitted_constant: float | None = None
    verdict: bool = True
    extras: dict = field(default_factory=dict)

    @property
    def worst_margin(self) -> float:
        return min((r.margin for r in self.rows), default=math.inf)

    @staticmethod
    def from_rows(
        check_id: str,
        rows: list[ProbeRow],
        fitted_constant: float | None = None,
        extra_ok: bool = True,
        extras: dict | None = None,
    ) -> "BoundReport":
        verdict = extra_ok and all(r.passed for r in rows)
        return BoundReport(
            check_id, tuple(rows), fitted_constant, verdict, dict(extras or {})
        )

    def to_json_dict(self) -> dict:
        return {
            "id": self.check_id,
            "probes": [
                {"eps": r.eps, "lhs": r.lhs, "rhs": r.rhs, "budget": r.budget}
                for r in self.rows
            ],
            "fitted_constant": self.fitted_constant,
            "verdict": bool(self.verdict),
            "extras": self.extras,
        }

    def to_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"
        )


# --- Error budgets -----------------------------------------------------------


def density_budget(rho: GriddedDensity) -> float:
    """Additive error allowance for one estimated density:
    2 * truncated mass + step * total variation proxy + Monte Carlo L1 noise."""
    return 2.0 * rho.clipped_mass + rho.step * rho.total_variation() + rho.l1_noise


def boundary_correction(rho: GriddedDensity, eps: float) -> float:
    """Allowance for the free boundary values of the dual-modulus LP: a grid
    solution extends to compact support through unit-slope ramps whose
    objective contribution is bounded by eps * truncated tail mass."""
    return eps * rho.clipped_mass


# --- Shift modulus -----------------------------------------------------------


def _shift_l1(values: np.ndarray, k: int) -> float:
    """sum_i |values(i+k) - values(i)| with out-of-grid values read as 0."""
    if k >= values.shape[0]:
        return 2.0 * float(values.sum())
    return float(
        np.abs(values[k:] - values[:-k]).sum()
        + values[:k].sum()
        + values[-k:].sum()
    )


def max_shift_index(rho: GriddedDensity, eps: float) -> int:
    k = int(math.floor(eps / rho.step + 1e-9))
    if k < 2:
        raise EpsilonBelowResolution(
            f"eps={eps} below resolution 2*step={2 * rho.step}"
        )
    return k


def shift_modulus(rho: GriddedDensity, eps: float) -> float:
    """max over integer shifts k <= eps/step of step * sum |rho(.+k) - rho|."""
    k_max = max_shift_index(rho, eps)
    return rho.step * max(_shift_l1(rho.values, k) for k in range(1, k_max + 1))


def shift_modulus_curve(rho: GriddedDensity, eps_values) -> ModulusCurve:
    """Shift-modulus table with probes snapped to realized shifts k * step.

    Snapping keeps the abscissa equal to the shift that was actually taken,
    so log-log fits see no grid-granularity bias.  Duplicate snapped probes
    collapse to one entry.
    """
    ks = sorted({max_shift_index(rho, e) for e in eps_values})
    running = 0.0
    eps_out, vals = [], []
    prev_k = 0
    for k in ks:
        for j in range(prev_k + 1, k + 1):
            running = max(running, _shift_l1(rho.values, j))
        prev_k = k
        eps_out.append(k * rho.step)
        vals.append(rho.step * running)
    return ModulusCurve("shift", np.array(eps_out), np.array(vals))


# --- Dual modulus ------------------------------------------------------------


def _telescoped_weights(values: np.ndarray) -> np.ndarray:
    w = np.empty(values.shape[0])
    w[0] = -values[0]
    w[-1] = values[-2]
    if values.shape[0] > 2:
        w[1:-1] = values[:-2] - values[1:-1]
    return w


def dual_modulus(rho: GriddedDensity, eps: float) -> float:
    """Exact value of the grid LP

        max sum_i rho_i (phi_{i+1} - phi_i),  |phi_i| <= eps,
                                              |phi_{i+1} - phi_i| <= step.
    """
    if eps < 0:
        raise InputError(f"eps must be >= 0, got {eps}")
    if eps == 0.0:
        return 0.0
    return solve_chain_lp(_telescoped_weights(rho.values), eps, rho.step)


def dual_modulus_curve(rho: GriddedDensity, eps_values) -> ModulusCurve:
    eps_sorted = np.unique(np.asarray(list(eps_values), dtype=np.float64))
    if np.any(eps_sorted <= 0):
        raise InputError("dual modulus probes must be positive")
    w = _telescoped_weights(rho.values)
    vals = np.array([solve_chain_lp(w, e, rho.step) for e in eps_sorted])
    return ModulusCurve("dual", eps_sorted, np.maximum.accumulate(vals))


def default_probe_grid(
    rho: GriddedDensity,
    lo: float | None = None,
    hi: float = 1.0,
    per_decade: int = 12,
) -> np.ndarray:
    """Geometric probe grid over [max(2*step, 1e-3), hi]."""
    floor = max(2.0 * rho.step, 1e-3) if lo is None else lo
    if floor >= hi:
        raise InputError(f"probe range [{floor}, {hi}] is empty")
    count = max(2, int(math.ceil(per_decade * math.log10(hi / floor))) + 1)
    return np.geomspace(floor, hi, count)


# --- Equivalence of the two moduli (factors 1/2 and 6) ------------------------


def modulus_equivalence_check(rho: GriddedDensity, eps_values) -> BoundReport:
    """Verify omega(rho, 2 eps)/2 <= sigma(rho, eps) <= 6 omega(rho, eps)
    at every probe, within the density's error budget."""
    base = density_budget(rho)
    w = _telescoped_weights(rho.values)
    rows: list[ProbeRow] = []
    for eps in np.asarray(list(eps_values), dtype=np.float64):
        sigma = solve_chain_lp(w, eps, rho.step)
        omega_2eps = shift_modulus(rho, 2.0 * eps)
        omega_eps = shift_modulus(rho, eps)
        corr = boundary_correction(rho, eps)
        rows.append(
            ProbeRow(float(eps), 0.5 * omega_2eps, sigma, 2.0 * base + corr)
        )
        rows.append(
            ProbeRow(float(eps), sigma, 6.0 * omega_eps, 13.0 * base + corr)
        )
    return BoundReport.from_rows(
        "modulus-equivalence", rows, extras={"budget_base": base}
    )


# --- Small-set probability bound ----------------------------------------------


def small_set_check(
    cdf: EmpiricalCdf,
    n_samples: int,
    rho: GriddedDensity,
    intervals,
) -> BoundReport:
    """Empirical P(W in (a, b]) against sigma(rho, b - a) plus a 4-sigma
    binomial band and the density budget."""
    base = density_budget(rho)
    rows: list[ProbeRow] = []
    for a, b in intervals:
        if b < a:
            raise InputError(f"interval endpoints out of order: ({a}, {b}]")
        p_hat = cdf.interval_prob(a, b)
        length = b - a
        sigma = dual_modulus(rho, length)
        band = 4.0 * math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n_samples)
        band += 1.0 / n_samples
        rows.append(
            ProbeRow(
                float(length),
                p_hat,
                sigma,
                band + base + boundary_correction(rho, length),
            )
        )
    return BoundReport.from_rows("small-set", rows, extras={"budget_base": base})


# --- Scaling-law envelope ------------------------------------------------------


def modulus_envelope(p: EnvelopeParams, eps: float, exponent_bias: float = 0.0) -> float:
    """(eps/a)^(1/m) * (|ln(eps/a)|^(d-m) + 1), the unit-constant envelope.

    ``exponent_bias`` perturbs the 1/m exponent; nonzero values deliberately
    corrupt the envelope (self-test hook for the verification harness).
    """
    if eps <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    u = eps / p.lead
    return u ** (1.0 / p.m + exponent_bias) * _log_bracket(u, p.d - p.m)


def _ols_slope(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class EnvelopeFit:
    """Fitted constant and exponent diagnostics for a modulus curve.

    c_hat:          max of value / envelope over the fitted probes.
    ratio_slope:    log-log trend of that ratio (0 for a perfect fit; a
                    negative trend means the ratio grows as eps shrinks,
                    i.e. the envelope is violated asymptotically).
    slope_loglog:   raw log value vs log eps slope; drags below 1/m when
                    d > m because the log factor is real.
    slope_adjusted: slope after dividing the log factor out; compares
                    directly against 1/m.
    """

    c_hat: float
    ratios: np.ndarray
    ratio_slope: float
    slope_loglog: float
    slope_adjusted: float


def fit_envelope(
    curve: ModulusCurve,
    p: EnvelopeParams,
    fit_lo: float | None = None,
    fit_hi: float | None = None,
    exponent_bias: float = 0.0,
) -> EnvelopeFit:
    eps = curve.eps
    vals = curve.values
    keep = vals > 0
    if fit_lo is not None:
        keep &= eps >= fit_lo * (1.0 - 1e-9)
    if fit_hi is not None:
        keep &= eps <= fit_hi * (1.0 + 1e-9)
    if keep.sum() < 3:
        raise InputError("envelope fit needs at least 3 positive curve points")
    eps, vals = eps[keep], vals[keep]
    env = np.array([modulus_envelope(p, e, exponent_bias) for e in eps])
    ratios = vals / env
    log_eps = np.log(eps)
    log_factor = np.array([_log_bracket(e / p.lead, p.d - p.m) for e in eps])
    return EnvelopeFit(
        c_hat=float(ratios.max()),
        ratios=ratios,
        ratio_slope=_ols_slope(log_eps, np.log(ratios)),
        slope_loglog=_ols_slope(log_eps, np.log(vals)),
        slope_adjusted=_ols_slope(log_eps, np.log(vals / log_factor)),
    )


def envelope_check(
    curve: ModulusCurve,
    p: EnvelopeParams,
    ratio_slope_tol: float = 0.15,
    slope_range: tuple[float, float] | None = None,
    fit_lo: float | None = None,
    fit_hi: float | None = None,
    exponent_bias: float = 0.0,
) -> BoundReport:
    """Boundedness of the modulus against the scaling-law envelope.

    Passes when the fitted constant is finite and the log-log trend of the
    ratio stays inside ``slope_range`` (default symmetric
    ``+-ratio_slope_tol``): a strong trend either way means the claimed
    exponent is wrong for this curve.  Oracle-grade curves restricted to
    small eps sit near zero; Monte Carlo curves probed up to eps ~ 1 need a
    wider window because the log bracket collapses as eps approaches the
    leading magnitude.
    """
    fit = fit_envelope(curve, p, fit_lo, fit_hi, exponent_bias)
    lo_s, hi_s = slope_range if slope_range else (-ratio_slope_tol, ratio_slope_tol)
    rows = [
        ProbeRow(float(e), float(v), fit.c_hat * modulus_envelope(p, e, exponent_bias), 1e-12)
        for e, v in zip(curve.eps, curve.values)
        if v > 0
    ]
    ok = math.isfinite(fit.c_hat) and lo_s <= fit.ratio_slope <= hi_s
    return BoundReport.from_rows(
        "modulus-envelope",
        rows,
        fitted_constant=fit.c_hat,
        extra_ok=ok,
        extras={
            "ratio_slope": fit.ratio_slope,
            "slope_range": [lo_s, hi_s],
            "slope_loglog": fit.slope_loglog,
            "slope_adjusted": fit.slope_adjusted,
            "expected_exponent": 1.0 / p.m,
        },
    )


def degree_envelope_check(
    var: float, curve: ModulusCurve, d: int
) -> BoundReport:
    """Fallback bound ignoring the power cap: the dual modulus is at most
    C(d) * Var^(-1/(2d)) * eps^(1/d); fits C and checks the log-log slope
    stays above 1/d - 0.1."""
    if var <= 0:
        raise ZeroVariance("degree envelope needs positive variance")
    keep = curve.values > 0
    if keep.sum() < 3:
        raise InputError("degree envelope fit needs at least 3 positive points")
    eps, vals = curve.eps[keep], curve.values[keep]
    env = var ** (-0.5 / d) * eps ** (1.0 / d)
    c_hat = float((vals / env).max())
    slope = _ols_slope(np.log(eps), np.log(vals))
    ok = slope >= 1.0 / d - 0.1
    rows = [
        ProbeRow(float(e), float(v), c_hat * var ** (-0.5 / d) * e ** (1.0 / d), 1e-12)
        for e, v in zip(eps, vals)
    ]
    return BoundReport.from_rows(
        "degree-envelope",
        rows,
        fitted_constant=c_hat,
        extra_ok=ok,
        extras={"slope": slope, "slope_floor": 1.0 / d - 0.1, "variance": var},
    )


# --- Distances ----------------------------------------------------------------


def _common_grid(
    x: GriddedDensity, y: GriddedDensity, max_cells: int = 8192
) -> tuple[float, float, int, np.ndarray, np.ndarray]:
    if x.lo == y.lo and x.step == y.step and x.size == y.size:
        return x.lo, x.step, x.size, x.values, y.values
    lo = min(x.lo, y.lo)
    hi = max(x.hi, y.hi)
    step = min(x.step, y.step)
    size = int(math.ceil((hi - lo) / step))
    if size > max_cells:
        step = (hi - lo) / max_cells
        size = max_cells
    if not (np.isfinite(lo) and np.isfinite(step) and step > 0 and size >= 2):
        raise GridMismatch(f"cannot align grids [{x.lo},{x.hi}] and [{y.lo},{y.hi}]")
    vx = resample_density(x, lo, step, size)
    vy = resample_density(y, lo, step, size)
    return lo, step, size, vx, vy


def tv_distance(x: GriddedDensity, y: GriddedDensity) -> float:
    """Total variation distance: L1 distance of densities, in [0, 2]."""
    _, step, _, vx, vy = _common_grid(x, y)
    return step * float(np.abs(vx - vy).sum())


def kr_distance(x: GriddedDensity, y: GriddedDensity) -> float:
    """Bounded-Lipschitz distance: sup of int phi d(X - Y) over |phi| <= 1,
    |phi'| <= 1; the same chain LP as the dual modulus with unit box and
    direct weights step * (rho_X - rho_Y)."""
    _, step, _, vx, vy = _common_grid(x, y)
    return solve_chain_lp(step * (vx - vy), 1.0, step)


def tv_vs_kr_check(
    x: GriddedDensity, y: GriddedDensity, eps_values
) -> BoundReport:
    """d_TV <= 6 max(sigma_X(eps), sigma_Y(eps)) + d_KR / eps on probes in (0,1)."""
    eps_arr = np.asarray(list(eps_values), dtype=np.float64)
    if np.any((eps_arr <= 0) | (eps_arr >= 1)):
        raise InputError("probes must lie in (0, 1)")
    tv = tv_distance(x, y)
    kr = kr_distance(x, y)
    base = density_budget(x) + density_budget(y)
    rows = []
    for eps in eps_arr:
        sig = max(dual_modulus(x, eps), dual_modulus(y, eps))
        rhs = 6.0 * sig + kr / eps
        budget = (7.0 + 1.0 / eps) * base
        rows.append(ProbeRow(float(eps), tv, rhs, budget))
    return BoundReport.from_rows(
        "tv-vs-kr", rows, extras={"tv": tv, "kr": kr, "budget_base": base}
    )


def balancing_epsilon(dkr: float, m: int, d: int) -> float:
    """Smoothing scale that balances the two bound terms:

        eps = (dkr/3)^(m/(m+1)) * |ln(dkr/3)|^((m-d) m/(m+1))

    Must land in (0, 1) for the two-term bound to apply; callers flag it
    otherwise."""
    if dkr <= 0:
        raise NonpositiveDistance(f"distance must be positive, got {dkr}")
    if dkr > 2.0 + 1e-9:
        raise InputError(f"bounded-Lipschitz distance cannot exceed 2, got {dkr}")
    u = dkr / 3.0
    power = m / (m + 1.0)
    # multiplicative log factor: exponent zero means the factor is 1
    return u ** power * abs(math.log(u)) ** ((m - d) * power)


def tv_kr_rate_ratio(tv: float, kr: float, m: int, d: int) -> float:
    """Ratio of d_TV to the rate d_KR^(1/(m+1)) (|ln d_KR|^((d-m)m/(m+1)) + 1);
    bounded ratios across a family witness the distance-comparison law."""
    if kr <= 0:
        raise NonpositiveDistance(f"distance must be positive, got {kr}")
    expo = (d - m) * m / (m + 1.0)
    rate = kr ** (1.0 / (m + 1.0)) * _log_bracket(kr, expo)
    return tv / rate
