import math

import numpy as np
import pytest

import polygauss as pg
from polygauss.errors import InputError, InsufficientDecay
from polygauss.poly import monomial, scale


def test_modulus_near_zero_t(x1_samples):
    curve = pg.ecf_modulus(x1_samples, [1e-6])
    assert curve.modulus[0] == pytest.approx(1.0, abs=1e-4)


def test_oracle_values_at_unit_t(x1_samples, x1sq_samples, x1x2_samples):
    tol = 4.0 / math.sqrt(x1_samples.count)
    got = pg.ecf_modulus(x1_samples, [1.0]).modulus[0]
    assert got == pytest.approx(math.exp(-0.5), abs=tol)
    got = pg.ecf_modulus(x1sq_samples, [1.0]).modulus[0]
    assert got == pytest.approx(5.0 ** -0.25, abs=tol)
    got = pg.ecf_modulus(x1x2_samples, [1.0]).modulus[0]
    assert got == pytest.approx(2.0 ** -0.5, abs=tol)


def test_conjugate_symmetry(x1x2_samples):
    v = x1x2_samples.values[:50_000]
    for t in (0.7, 3.0):
        plus = abs(np.exp(1j * t * v).mean())
        minus = abs(np.exp(-1j * t * v).mean())
        assert abs(plus - minus) <= 1e-12


def test_moduli_below_one_plus_noise(x1x2_samples):
    curve = pg.ecf_modulus(x1x2_samples, pg.default_t_grid(0.1, 100.0, 8))
    assert np.all(curve.modulus <= 1.0 + 4.0 * curve.stderr)


def test_requires_enough_samples():
    s = pg.sample(monomial(1, (1,)), 5_000, seed=3)
    with pytest.raises(InputError):
        pg.ecf_modulus(s, [1.0])
    with pytest.raises(InputError):
        pg.ecf_modulus(pg.sample(monomial(1, (1,)), 20_000, seed=3), [-1.0])


def test_decay_slope_product_case(x1x2_samples):
    curve = pg.ecf_modulus(x1x2_samples, pg.default_t_grid(10.0, 1e3, 16))
    floor = 5.0 / math.sqrt(x1x2_samples.count)
    keep = curve.modulus >= floor
    slope = np.polyfit(np.log(curve.t[keep]), np.log(curve.modulus[keep]), 1)[0]
    assert -1.1 <= slope <= -0.9


def test_decay_check_oracles(x1_samples, x1sq_samples, x1x2_samples):
    cases = [
        (x1_samples, pg.EnvelopeParams(m=1, d=1)),
        (x1sq_samples, pg.EnvelopeParams(m=2, d=2)),
        (x1x2_samples, pg.EnvelopeParams(m=1, d=2)),
    ]
    for s, p in cases:
        curve = pg.ecf_modulus(s, pg.default_t_grid())
        report = pg.cf_decay_check(curve, p)
        assert report.verdict
        assert report.fitted_constant > 0


def test_decay_check_square_ratio_limit(x1sq_samples):
    # |ecf| = (1 + 4 t^2)^(-1/4) against envelope t^(-1/2): ratio tends to 2^(-1/2)
    curve = pg.ecf_modulus(x1sq_samples, pg.default_t_grid())
    report = pg.cf_decay_check(curve, pg.EnvelopeParams(m=2, d=2))
    assert report.fitted_constant == pytest.approx(2.0 ** -0.5, abs=0.05)
    assert abs(report.extras["ratio_slope"]) <= 0.1


def test_insufficient_decay_all_noise():
    s = pg.sample(scale(monomial(1, (1,)), 50.0), 10_000, seed=4)
    curve = pg.ecf_modulus(s, pg.default_t_grid(0.1, 100.0, 8))
    with pytest.raises(InsufficientDecay):
        pg.cf_decay_check(curve, pg.EnvelopeParams(m=1, d=1, lead=50.0))


def test_trend_skipped_for_fast_decay():
    # wide near-Gaussian law probed with unit leading magnitude: the modulus
    # dies at t ~ 1/3 and almost no probes survive in the fit regime t >= 1
    s = pg.sample(scale(monomial(1, (1,)), 3.0), 200_000, seed=5)
    curve = pg.ecf_modulus(s, pg.default_t_grid(0.01, 1e3))
    report = pg.cf_decay_check(curve, pg.EnvelopeParams(m=1, d=2, lead=1.0))
    assert report.verdict
    assert report.extras["ratio_slope"] is None


def test_decay_exponents():
    assert pg.decay_exponents(pg.EnvelopeParams(m=1, d=2), 2) == (1.0, 1.0)
    assert pg.decay_exponents(pg.EnvelopeParams(m=2, d=2), 4) == (0.0, 4.5)
    assert pg.decay_exponents(pg.EnvelopeParams(m=1, d=3), 10) == (2.0, 12.5)


def test_curve_csv(tmp_path, x1_samples):
    curve = pg.ecf_modulus(x1_samples, [0.5, 1.0, 2.0])
    curve.to_csv(tmp_path / "cf.csv")
    lines = (tmp_path / "cf.csv").read_text().splitlines()
    assert lines[0] == "t,modulus,stderr"
    assert len(lines) == 4
