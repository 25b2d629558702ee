import math

import numpy as np
import pytest
from scipy.special import ndtr

import polygauss as pg
from polygauss.errors import (
    EpsilonBelowResolution,
    InputError,
    NonpositiveDistance,
    ZeroVariance,
)
from polygauss.functionals import ModulusCurve, boundary_correction, density_budget


def gauss_shift_l1(h):
    """Closed form for the L1 distance between the standard normal density
    and its shift by h."""
    return 4.0 * ndtr(h / 2.0) - 2.0


# --- shift modulus ------------------------------------------------------------


def test_shift_modulus_gaussian_closed_form(normal_oracle):
    for eps in (0.05, 0.1, 0.2, 0.5):
        got = pg.shift_modulus(normal_oracle, eps)
        assert got == pytest.approx(gauss_shift_l1(eps), abs=0.003)


def test_shift_modulus_saturates_at_span(normal_oracle):
    got = pg.shift_modulus(normal_oracle, 20.0)
    assert got == pytest.approx(2.0 * normal_oracle.mass, abs=1e-9)


def test_shift_modulus_monotone(normal_oracle):
    eps = np.geomspace(0.01, 2.0, 25)
    vals = [pg.shift_modulus(normal_oracle, e) for e in eps]
    assert np.all(np.diff(vals) >= 0)


def test_shift_modulus_resolution_guard(normal_oracle):
    with pytest.raises(EpsilonBelowResolution):
        pg.shift_modulus(normal_oracle, normal_oracle.step * 1.5)


def test_shift_curve_snaps_to_realized_shifts(normal_oracle):
    curve = pg.shift_modulus_curve(normal_oracle, [0.05, 0.0501, 0.1])
    ks = np.round(curve.eps / normal_oracle.step)
    assert np.allclose(curve.eps, ks * normal_oracle.step)
    assert len(curve.eps) == 2  # 0.05 and 0.0501 snap to the same shift


# --- dual modulus ---------------------------------------------------------------


def uniform_grid(size):
    return pg.GriddedDensity(0.0, 1.0 / size, np.ones(size))


def test_dual_modulus_uniform_oracle():
    rho = uniform_grid(100)
    for eps in (0.1, 0.2, 0.5, 1.0, 10.0):
        got = pg.dual_modulus(rho, eps)
        assert abs(got - min(2 * eps, 1.0)) <= 2.0 * rho.step


def test_dual_modulus_upper_bound(normal_oracle, chisq_oracle):
    for rho in (normal_oracle, chisq_oracle):
        assert pg.dual_modulus(rho, 50.0) <= 2.0 + 1e-9


def test_dual_modulus_zero_eps(normal_oracle):
    assert pg.dual_modulus(normal_oracle, 0.0) == 0.0


def test_dual_modulus_matches_vertex_enumeration_small_grids():
    from polygauss.functionals import _telescoped_weights
    from polygauss.lp import brute_force_chain_lp

    rng = np.random.default_rng(31)
    for size in (6, 9, 12):
        vals = rng.exponential(size=size)
        step = 1.0 / size
        rho = pg.GriddedDensity(0.0, step, vals / (vals.sum() * step))
        w = _telescoped_weights(rho.values)
        for eps in (0.5 * step, 2.0 * step, 0.3, 1.0):
            assert pg.dual_modulus(rho, eps) == pytest.approx(
                brute_force_chain_lp(w, eps, step), abs=1e-9
            )


def test_dual_curve_monotone_concave(normal_oracle):
    eps = np.geomspace(0.02, 1.0, 20)
    curve = pg.dual_modulus_curve(normal_oracle, eps)
    vals = curve.values
    assert np.all(np.diff(vals) >= -1e-9)
    # concavity on the geometric grid, checked against linear interpolation
    for i in range(1, len(eps) - 1):
        lam = (eps[i] - eps[i - 1]) / (eps[i + 1] - eps[i - 1])
        chord = (1 - lam) * vals[i - 1] + lam * vals[i + 1]
        assert vals[i] >= chord - 1e-9


def test_scaling_identity_oracles():
    base = pg.oracle_density("normal", -4.0, 4.0, 1024)
    for alpha in (2.0, 5.0):
        scaled = pg.oracle_density("normal", -4.0 * alpha, 4.0 * alpha, 1024, sigma=alpha)
        for t in (0.1, 0.5, 1.0):
            lhs = pg.dual_modulus(scaled, t)
            rhs = pg.dual_modulus(base, t / alpha)
            budget = density_budget(base) + density_budget(scaled)
            assert abs(lhs - rhs) <= budget + 1e-9


def test_scaling_identity_chisq(chisq_oracle):
    scaled = pg.affine_density(chisq_oracle, 2.0)
    for t in (0.1, 0.4):
        lhs = pg.dual_modulus(scaled, t)
        rhs = pg.dual_modulus(chisq_oracle, t / 2.0)
        assert abs(lhs - rhs) <= density_budget(chisq_oracle) * 2 + 1e-9


# --- equivalence of the moduli ---------------------------------------------------


def test_equivalence_oracles(normal_oracle, chisq_oracle, product_oracle):
    for rho in (normal_oracle, chisq_oracle, product_oracle):
        probes = pg.default_probe_grid(rho)
        report = pg.modulus_equivalence_check(rho, probes)
        assert report.verdict
        assert all(r.margin >= -r.budget for r in report.rows)


def test_equivalence_monte_carlo(x1x2_samples):
    h = pg.histogram_density(x1x2_samples, 400)
    report = pg.modulus_equivalence_check(h, pg.default_probe_grid(h))
    assert report.verdict


def test_equivalence_near_dirac_flags_budget():
    rho = pg.oracle_density("normal", -0.01, 0.01, 256, sigma=0.001)
    probes = pg.default_probe_grid(rho, hi=0.005)
    report = pg.modulus_equivalence_check(rho, probes)
    assert report.verdict
    assert report.extras["budget_base"] > 0.01  # large budget is surfaced


# --- small-set probability --------------------------------------------------------


def test_small_set_gaussian(x1_samples):
    h = pg.histogram_density(x1_samples, 400)
    cdf = pg.ecdf(x1_samples)
    report = pg.small_set_check(cdf, x1_samples.count, h, [(-0.05, 0.05)])
    row = report.rows[0]
    assert row.lhs == pytest.approx(2 * ndtr(0.05) - 1, abs=0.002)
    assert report.verdict


def test_small_set_trivial_cases(x1_samples):
    h = pg.histogram_density(x1_samples, 400)
    cdf = pg.ecdf(x1_samples)
    span = h.hi - h.lo
    report = pg.small_set_check(
        cdf, x1_samples.count, h, [(h.lo, h.lo + span), (0.25, 0.25)]
    )
    assert report.verdict
    assert report.rows[1].lhs == 0.0  # empty interval


# --- envelope ---------------------------------------------------------------------


def test_envelope_value_examples():
    p = pg.EnvelopeParams(m=1, d=2)
    assert pg.modulus_envelope(p, math.exp(-1)) == pytest.approx(2 * math.exp(-1))
    p = pg.EnvelopeParams(m=3, d=3, lead=5.0)
    assert pg.modulus_envelope(p, 5.0) == pytest.approx(1.0)
    p = pg.EnvelopeParams(m=2, d=3, lead=2.0)
    assert pg.modulus_envelope(p, 2 * math.exp(-2)) == pytest.approx(3 * math.exp(-1))


def test_envelope_fit_self_consistency():
    p = pg.EnvelopeParams(m=2, d=3)
    eps = np.geomspace(1e-3, 0.1, 20)
    vals = np.array([pg.modulus_envelope(p, e) for e in eps])
    curve = ModulusCurve("shift", eps, vals)
    fit = pg.fit_envelope(curve, p)
    assert fit.c_hat == pytest.approx(1.0)
    assert fit.ratio_slope == pytest.approx(0.0, abs=1e-9)
    assert fit.slope_adjusted == pytest.approx(0.5, abs=1e-12)


def test_envelope_gaussian_constant(normal_oracle):
    curve = pg.shift_modulus_curve(normal_oracle, np.geomspace(0.01, 0.1, 13))
    fit = pg.fit_envelope(curve, pg.EnvelopeParams(m=1, d=1))
    assert fit.c_hat == pytest.approx(math.sqrt(2 / math.pi), abs=0.005)
    assert 0.97 <= fit.slope_loglog <= 1.01


def test_envelope_check_catches_corrupt_exponent(normal_oracle):
    curve = pg.shift_modulus_curve(normal_oracle, np.geomspace(0.01, 0.1, 13))
    p = pg.EnvelopeParams(m=1, d=1)
    good = pg.envelope_check(curve, p)
    assert good.verdict
    bad = pg.envelope_check(curve, p, exponent_bias=-0.5)
    assert not bad.verdict


def test_degree_envelope_gaussian(normal_oracle):
    eps = np.geomspace(0.01, 0.3, 15)
    sigma = pg.dual_modulus_curve(normal_oracle, eps)
    report = pg.degree_envelope_check(1.0, sigma, d=1)
    assert report.verdict
    assert report.extras["slope"] == pytest.approx(1.0, abs=0.05)


def test_degree_envelope_chisq(chisq_oracle):
    eps = np.geomspace(0.02, 0.3, 12)
    sigma = pg.dual_modulus_curve(chisq_oracle, eps)
    report = pg.degree_envelope_check(2.0, sigma, d=2)
    assert report.verdict
    assert report.extras["slope"] >= 0.4


def test_degree_envelope_scaling_compensation(normal_oracle):
    # doubling the polynomial doubles scale; the variance factor compensates
    eps = np.geomspace(0.02, 0.3, 12)
    doubled = pg.oracle_density("normal", -8.0, 8.0, 2048, sigma=2.0)
    c1 = pg.degree_envelope_check(
        1.0, pg.dual_modulus_curve(normal_oracle, eps), d=1
    ).fitted_constant
    c2 = pg.degree_envelope_check(
        4.0, pg.dual_modulus_curve(doubled, eps), d=1
    ).fitted_constant
    assert abs(c1 - c2) / c1 <= 0.05


def test_degree_envelope_rejects_zero_variance(normal_oracle):
    eps = np.geomspace(0.02, 0.3, 6)
    curve = pg.dual_modulus_curve(normal_oracle, eps)
    with pytest.raises(ZeroVariance):
        pg.degree_envelope_check(0.0, curve, d=2)


# --- distances --------------------------------------------------------------------


def test_tv_identical_and_disjoint(normal_oracle):
    assert pg.tv_distance(normal_oracle, normal_oracle) == 0.0
    far = pg.affine_density(normal_oracle, 1.0, 100.0)
    assert pg.tv_distance(normal_oracle, far) == pytest.approx(2.0, abs=1e-3)


def test_tv_gaussian_shift(normal_oracle):
    shifted = pg.oracle_density("normal", -4.0, 4.0, 2048, mu=0.1)
    got = pg.tv_distance(normal_oracle, shifted)
    assert got == pytest.approx(gauss_shift_l1(0.1), abs=0.005)


def test_kr_basics(normal_oracle):
    assert pg.kr_distance(normal_oracle, normal_oracle) == pytest.approx(0.0, abs=1e-12)
    far = pg.affine_density(normal_oracle, 1.0, 100.0)
    assert pg.kr_distance(normal_oracle, far) <= 2.0 + 1e-9


def test_kr_below_tv_on_random_pairs():
    rng = np.random.default_rng(8)
    size = 200
    step = 0.02
    for _ in range(50):
        a = rng.exponential(size=size)
        b = rng.exponential(size=size)
        rho_a = pg.GriddedDensity(0.0, step, a / (a.sum() * step))
        rho_b = pg.GriddedDensity(0.0, step, b / (b.sum() * step))
        tv = pg.tv_distance(rho_a, rho_b)
        kr = pg.kr_distance(rho_a, rho_b)
        assert 0.0 <= kr <= tv + 1e-9
        assert kr <= 2.0 + 1e-9


def test_metric_axioms_on_common_grid():
    rng = np.random.default_rng(21)
    size, step = 150, 0.03
    def rand_density():
        v = rng.exponential(size=size)
        return pg.GriddedDensity(0.0, step, v / (v.sum() * step))
    for _ in range(20):
        a, b, c = rand_density(), rand_density(), rand_density()
        for dist in (pg.tv_distance, pg.kr_distance):
            assert dist(a, b) == pytest.approx(dist(b, a), abs=1e-9)
            assert dist(a, b) >= -1e-12
            assert dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9


def test_tv_vs_kr_check_same_density(normal_oracle):
    report = pg.tv_vs_kr_check(normal_oracle, normal_oracle, [0.1, 0.5])
    assert report.verdict
    assert report.extras["tv"] == 0.0


def test_tv_vs_kr_check_probe_domain(normal_oracle):
    with pytest.raises(InputError):
        pg.tv_vs_kr_check(normal_oracle, normal_oracle, [0.5, 1.5])


def test_tv_vs_kr_far_shift(normal_oracle):
    far = pg.oracle_density("normal", 2.0, 10.0, 2048, mu=6.0)
    report = pg.tv_vs_kr_check(normal_oracle, far, np.geomspace(0.05, 0.9, 6))
    assert report.verdict  # the kr/eps term carries the bound


def test_balancing_epsilon():
    got = pg.balancing_epsilon(0.3, 1, 2)
    assert got == pytest.approx(0.1**0.5 * abs(math.log(0.1)) ** -0.5)
    # m = d: pure power, log factor is 1
    assert pg.balancing_epsilon(0.3, 2, 2) == pytest.approx(0.1 ** (2.0 / 3.0))
    # near-maximal distances push the balancing scale above 1: the two-term
    # bound no longer applies there and callers flag it
    assert pg.balancing_epsilon(1.9, 1, 2) > 1.0
    with pytest.raises(NonpositiveDistance):
        pg.balancing_epsilon(0.0, 1, 2)
    with pytest.raises(InputError):
        pg.balancing_epsilon(2.5, 1, 2)


def test_rate_ratio_guards():
    with pytest.raises(NonpositiveDistance):
        pg.tv_kr_rate_ratio(0.1, 0.0, 1, 2)
    assert pg.tv_kr_rate_ratio(0.2, 0.04, 1, 1) == pytest.approx(0.2 / 0.2)


# --- curves and reports -----------------------------------------------------------


def test_curve_validation():
    with pytest.raises(InputError):
        ModulusCurve("shift", np.array([0.2, 0.1]), np.array([0.1, 0.2]))
    with pytest.raises(InputError):
        ModulusCurve("shift", np.array([0.1, 0.2]), np.array([0.2, 0.1]))
    with pytest.raises(InputError):
        ModulusCurve("shift", np.array([0.1, 0.2]), np.array([0.1, 3.0]))


def test_report_json_shape(normal_oracle, tmp_path):
    report = pg.modulus_equivalence_check(normal_oracle, [0.05, 0.1])
    data = report.to_json_dict()
    assert set(data) == {"id", "probes", "fitted_constant", "verdict", "extras"}
    assert all(set(p) == {"eps", "lhs", "rhs", "budget"} for p in data["probes"])
    report.to_json(tmp_path / "r.json")
    assert (tmp_path / "r.json").exists()


def test_boundary_correction_scales_with_eps(chisq_oracle):
    assert boundary_correction(chisq_oracle, 0.5) == pytest.approx(
        0.5 * chisq_oracle.clipped_mass
    )


def test_curve_csv(tmp_path, normal_oracle):
    curve = pg.shift_modulus_curve(normal_oracle, [0.05, 0.1])
    curve.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "eps,value"
    assert len(lines) == 3
