"""Command-line harness: polynomial -> samples -> density -> functionals -> reports.

Subcommands: variance | modulus | cf | distance | verify-all.
A single JSON config document is the source of truth; CLI flags override
top-level fields.  Identical config + seed reproduces byte-identical data
outputs (timings live only in the run manifest).

Exit codes: 0 all verdicts pass, 2 verdict failure, 3 input error,
4 resolution or noise-floor error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .charfn import cf_decay_check, decay_exponents, default_t_grid, ecf_modulus
from .density import (
    GriddedDensity,
    SampleSet,
    ecdf,
    histogram_density,
    sample,
    save_samples,
)
from .errors import (
    DegenerateRange,
    EpsilonBelowResolution,
    InputError,
    InsufficientDecay,
    NonpositiveDistance,
    PolyGaussError,
    ZeroVariance,
)
from .functionals import (
    EnvelopeParams,
    balancing_epsilon,
    default_probe_grid,
    degree_envelope_check,
    dual_modulus_curve,
    envelope_check,
    modulus_equivalence_check,
    shift_modulus_curve,
    small_set_check,
    tv_kr_rate_ratio,
    tv_vs_kr_check,
)
from .moments import variance, variance_via_hermite
from .poly import (
    ClassParams,
    Polynomial,
    add,
    degree,
    from_json_dict,
    leading_magnitude,
    max_var_power,
    random_in_class,
    scale,
    variable,
)

EXIT_OK = 0
EXIT_VERDICT = 2
EXIT_INPUT = 3
EXIT_RESOLUTION = 4

RESOLUTION_ERRORS = (
    EpsilonBelowResolution,
    InsufficientDecay,
    DegenerateRange,
    ZeroVariance,
)

# Ratio-trend window for Monte Carlo modulus curves probed up to eps ~ 1:
# the envelope's log bracket collapses near the leading magnitude, which
# legitimately tilts the ratio upward there; oracle-grade small-eps curves
# are held to the tight symmetric window instead.
MC_SLOPE_RANGE = (-0.6, 1.0)

DEFAULTS = {
    "seed": 1,
    "samples": 1_000_000,
    "grid": 400,
    "workers": 1,
    "out": "out",
    "svg": False,
    "eps": {"lo": None, "hi": 1.0, "per_decade": 12},
    "t": {"lo": 0.1, "hi": 1000.0, "per_decade": 16},
    "cf_samples": 200_000,
    "perturbation": 0.1,
    "corrupt_envelope_exponent": 0.0,
    "polynomial": None,
    "polynomial_b": None,
    "family": None,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # route usage errors to exit code 3
        raise InputError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="polygauss", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("variance", "modulus", "cf", "distance", "verify-all"):
        s = sub.add_parser(name)
        s.add_argument("--config", type=str, default=None)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--out", type=str, default=None)
        s.add_argument("--samples", type=int, default=None)
        s.add_argument("--grid", type=int, default=None)
        s.add_argument("--workers", type=int, default=None)
        s.add_argument("--n", type=int, default=None)
        s.add_argument("--m", type=int, default=None)
        s.add_argument("--d", type=int, default=None)
        s.add_argument("--count", type=int, default=None, help="family size K")
        s.add_argument("--poly", type=str, default=None,
                       help="inline polynomial JSON or @path")
        s.add_argument("--poly-b", type=str, default=None)
        s.add_argument("--svg", action="store_true", default=None)
    return p


def _load_config(args: argparse.Namespace) -> dict:
    cfg = json.loads(json.dumps(DEFAULTS))  # deep copy
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise InputError(f"config file not found: {path}")
        try:
            user = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid config JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise InputError("config must be a JSON object")
        unknown = set(user) - set(DEFAULTS)
        if unknown:
            raise InputError(f"unknown config fields: {sorted(unknown)}")
        cfg.update(user)
    for key in ("seed", "out", "samples", "grid", "workers"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.svg:
        cfg["svg"] = True
    if args.poly is not None:
        cfg["polynomial"] = args.poly
    if args.poly_b is not None:
        cfg["polynomial_b"] = args.poly_b
    fam = dict(cfg["family"] or {})
    for key in ("n", "m", "d", "count"):
        val = getattr(args, key, None)
        if val is not None:
            fam[key] = val
    cfg["family"] = fam or None
    return cfg


def _resolve_polynomial(spec, what: str = "polynomial") -> Polynomial:
    if spec is None:
        raise InputError(f"no {what} given (config field or --poly)")
    if isinstance(spec, dict):
        return from_json_dict(spec)
    text = str(spec)
    if text.startswith("@"):
        path = Path(text[1:])
        if not path.exists():
            raise InputError(f"{what} file not found: {path}")
        text = path.read_text()
    elif not text.lstrip().startswith("{"):
        path = Path(text)
        if not path.exists():
            raise InputError(f"{what} file not found: {path}")
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid {what} JSON: {exc}") from exc
    return from_json_dict(data)


def _config_hash(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True).encode()
    ).hexdigest()[:16]


class _Run:
    """Collects output files and timings for the run manifest."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.out = Path(cfg["out"])
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []
        self.timings: dict[str, float] = {}
        self._t0 = time.perf_counter()

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.out / name

    def write_json(self, name: str, payload) -> None:
        self.path(name).write_text(
            json.dumps(payload, sort_keys=True, indent=2) + "\n"
        )

    def mark(self, label: str) -> None:
        self.timings[label] = time.perf_counter() - self._t0

    def finish(self) -> None:
        self.mark("total")
        manifest = {
            "config_hash": _config_hash(self.cfg),
            "tool_version": __version__,
            "files": sorted(self.files),
            "timings": self.timings,
        }
        (self.out / "run_manifest.json").write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        )


def _sample_and_histogram(
    f: Polynomial, cfg: dict, seed: int, lo=None, hi=None
) -> tuple[SampleSet, GriddedDensity]:
    s = sample(f, cfg["samples"], seed, workers=cfg["workers"])
    return s, histogram_density(s, cfg["grid"], lo=lo, hi=hi)


def _envelope_params(f: Polynomial) -> EnvelopeParams:
    lead, _ = leading_magnitude(f)
    return EnvelopeParams(m=max(1, max_var_power(f)), d=max(1, degree(f)), lead=lead)


def _maybe_svg(run: _Run, cfg: dict, name: str, x, y, title, xlab, ylab) -> None:
    if cfg["svg"]:
        from .svg import line_chart

        line_chart(run.path(name), x, y, title, xlab, ylab, logx=True, logy=True)


# --- Subcommands --------------------------------------------------------------


def cmd_variance(cfg: dict) -> int:
    f = _resolve_polynomial(cfg["polynomial"])
    run = _Run(cfg)
    v_moment = variance(f)
    v_hermite = variance_via_hermite(f)
    s = sample(f, cfg["samples"], cfg["seed"], workers=cfg["workers"])
    mc = float(np.var(s.values))
    m4 = float(np.mean((s.values - s.values.mean()) ** 4))
    se = math.sqrt(max(m4 - mc * mc, 0.0) / s.count)
    run.mark("compute")
    rel_gap = abs(v_moment - v_hermite) / (1.0 + abs(v_moment))
    methods_ok = rel_gap <= 1e-9
    mc_ok = abs(mc - v_moment) <= 4.0 * se + 1e-12
    if v_moment == 0.0:
        print("warning: variance is zero (constant polynomial)")
    payload = {
        "moment_method": v_moment,
        "hermite_method": v_hermite,
        "monte_carlo": mc,
        "monte_carlo_se": se,
        "samples": s.count,
        "seed": cfg["seed"],
        "agreement": bool(methods_ok and mc_ok),
    }
    run.write_json("variance.json", payload)
    run.finish()
    print(f"variance (moment method) : {v_moment:.12g}")
    print(f"variance (hermite method): {v_hermite:.12g}")
    print(f"variance (monte carlo)   : {mc:.12g} +- {se:.3g}")
    print(f"agreement: {'pass' if payload['agreement'] else 'FAIL'}")
    return EXIT_OK if payload["agreement"] else EXIT_VERDICT


def cmd_modulus(cfg: dict) -> int:
    f = _resolve_polynomial(cfg["polynomial"])
    run = _Run(cfg)
    s, rho = _sample_and_histogram(f, cfg, cfg["seed"])
    save_samples(s, run.path("samples.bin"), polynomial=f)
    run.files.append("samples.bin.json")
    eps_cfg = cfg["eps"]
    probes = default_probe_grid(
        rho, lo=eps_cfg.get("lo"), hi=eps_cfg["hi"],
        per_decade=eps_cfg["per_decade"],
    )
    omega = shift_modulus_curve(rho, probes)
    sigma = dual_modulus_curve(rho, probes)
    params = _envelope_params(f)
    env_report = envelope_check(
        omega, params, slope_range=MC_SLOPE_RANGE,
        exponent_bias=cfg["corrupt_envelope_exponent"],
    )
    equiv_report = modulus_equivalence_check(rho, probes)
    run.mark("compute")
    omega.to_csv(run.path("omega.csv"))
    sigma.to_csv(run.path("sigma.csv"))
    with open(run.path("envelope_ratios.csv"), "w") as fh:
        fh.write("eps,ratio\n")
        for row in env_report.rows:
            ratio = row.lhs / (row.rhs / env_report.fitted_constant)
            fh.write(f"{row.eps:.17g},{ratio:.17g}\n")
    run.write_json("modulus_report.json", {
        "envelope": env_report.to_json_dict(),
        "equivalence": equiv_report.to_json_dict(),
        "params": {"m": params.m, "d": params.d, "lead": params.lead},
    })
    _maybe_svg(run, cfg, "omega.svg", omega.eps, omega.values,
               "shift modulus", "eps", "omega")
    _maybe_svg(run, cfg, "sigma.svg", sigma.eps, sigma.values,
               "dual modulus", "eps", "sigma")
    run.finish()
    ok = env_report.verdict and equiv_report.verdict
    print(f"envelope: fitted constant {env_report.fitted_constant:.4g}, "
          f"ratio slope {env_report.extras['ratio_slope']:+.3f} "
          f"-> {'pass' if env_report.verdict else 'FAIL'}")
    print(f"equivalence: worst margin {equiv_report.worst_margin:+.4g} "
          f"-> {'pass' if equiv_report.verdict else 'FAIL'}")
    return EXIT_OK if ok else EXIT_VERDICT


def cmd_cf(cfg: dict) -> int:
    f = _resolve_polynomial(cfg["polynomial"])
    run = _Run(cfg)
    s = sample(f, cfg["samples"], cfg["seed"], workers=cfg["workers"])
    t_cfg = cfg["t"]
    curve = ecf_modulus(s, default_t_grid(t_cfg["lo"], t_cfg["hi"], t_cfg["per_decade"]))
    params = _envelope_params(f)
    report = cf_decay_check(curve, params)
    alpha_new, alpha_prior = decay_exponents(params, f.n)
    run.mark("compute")
    curve.to_csv(run.path("cf_curve.csv"))
    run.write_json("cf_report.json", {
        "decay": report.to_json_dict(),
        "log_exponents": {
            "structure_aware": alpha_new,
            "dimension_dependent": alpha_prior,
            "n": f.n, "m": params.m, "d": params.d,
        },
    })
    _maybe_svg(run, cfg, "cf_curve.svg", curve.t, np.maximum(curve.modulus, 1e-12),
               "ecf modulus", "t", "|phi|")
    run.finish()
    print(f"log-exponent comparison (n={f.n}, m={params.m}, d={params.d}): "
          f"structure-aware {alpha_new:g} vs dimension-dependent {alpha_prior:g}")
    print(f"cf decay: fitted constant {report.fitted_constant:.4g}, "
          f"ratio slope {report.extras['ratio_slope']:+.3f} "
          f"-> {'pass' if report.verdict else 'FAIL'}")
    return EXIT_OK if report.verdict else EXIT_VERDICT


def _distance_reports(
    f: Polynomial, g: Polynomial, cfg: dict, seed_f: int, seed_g: int
) -> dict:
    sf = sample(f, cfg["samples"], seed_f, workers=cfg["workers"])
    sg = sample(g, cfg["samples"], seed_g, workers=cfg["workers"])
    both = np.concatenate([sf.values, sg.values])
    q_lo, q_hi = np.quantile(both, [1e-4, 1.0 - 1e-4])
    if q_hi <= q_lo:
        raise DegenerateRange("both sample sets are (nearly) constant")
    pad = 2.0 * (q_hi - q_lo) / (cfg["grid"] - 4)
    rho_f = histogram_density(sf, cfg["grid"], lo=q_lo - pad, hi=q_hi + pad)
    rho_g = histogram_density(sg, cfg["grid"], lo=q_lo - pad, hi=q_hi + pad)
    report = tv_vs_kr_check(rho_f, rho_g, np.geomspace(0.05, 0.9, 8))
    tv = report.extras["tv"]
    kr = report.extras["kr"]
    params = _envelope_params(f)
    if kr > 1e-9:
        eps_star = balancing_epsilon(kr, params.m, params.d)
        ratio = tv_kr_rate_ratio(tv, kr, params.m, params.d)
    else:
        eps_star, ratio = None, None
    return {
        "tv": tv,
        "kr": kr,
        "kr_le_tv": bool(kr <= tv + 1e-9),
        "two_term_bound": report.to_json_dict(),
        "balancing_eps": eps_star,
        "balancing_eps_in_range": None if eps_star is None else bool(0 < eps_star < 1),
        "rate_ratio": ratio,
        "verdict": bool(report.verdict and kr <= tv + 1e-9),
    }


def cmd_distance(cfg: dict) -> int:
    f = _resolve_polynomial(cfg["polynomial"])
    g = _resolve_polynomial(cfg["polynomial_b"], what="polynomial_b")
    run = _Run(cfg)
    payload = _distance_reports(f, g, cfg, cfg["seed"], cfg["seed"] + 1)
    run.mark("compute")
    run.write_json("distance_report.json", payload)
    run.finish()
    print(f"tv = {payload['tv']:.6g}   kr = {payload['kr']:.6g}")
    if payload["rate_ratio"] is not None:
        print(f"rate ratio = {payload['rate_ratio']:.6g} "
              f"(balancing eps = {payload['balancing_eps']:.6g})")
    print(f"two-term bound: {'pass' if payload['verdict'] else 'FAIL'}")
    return EXIT_OK if payload["verdict"] else EXIT_VERDICT


def cmd_verify_all(cfg: dict) -> int:
    fam = cfg["family"]
    if not fam or not all(k in fam for k in ("n", "m", "d")):
        raise InputError("verify-all needs a family spec with n, m, d")
    params = ClassParams(int(fam["n"]), int(fam["m"]), int(fam["d"]))
    count = int(fam.get("count", 10))
    if count < 0:
        raise InputError(f"family count must be >= 0, got {count}")
    run = _Run(cfg)
    seeds = np.random.SeedSequence(cfg["seed"]).generate_state(
        max(3 * count, 1), dtype=np.uint64
    )
    families: dict[str, dict] = {}

    def record(name: str, passed: bool, margin: float) -> None:
        slot = families.setdefault(
            name, {"passed": 0, "total": 0, "worst_margin": math.inf}
        )
        slot["total"] += 1
        slot["passed"] += int(passed)
        slot["worst_margin"] = min(slot["worst_margin"], margin)

    for k in range(count):
        f = random_in_class(params, int(seeds[3 * k]))
        s, rho = _sample_and_histogram(f, cfg, int(seeds[3 * k + 1]))
        probes = default_probe_grid(rho)
        report = modulus_equivalence_check(rho, probes)
        record("modulus-equivalence", report.verdict, report.worst_margin)

        med = float(np.median(s.values))
        std = float(np.std(s.values))
        intervals = [
            (med - w / 2, med + w / 2) for w in (0.05 * std, 0.2 * std, std)
        ]
        report = small_set_check(ecdf(s), s.count, rho, intervals)
        record("small-set", report.verdict, report.worst_margin)

        env_params = _envelope_params(f)
        omega = shift_modulus_curve(rho, probes)
        report = envelope_check(
            omega, env_params, slope_range=MC_SLOPE_RANGE,
            exponent_bias=cfg["corrupt_envelope_exponent"],
        )
        lo_s, hi_s = report.extras["slope_range"]
        slope = report.extras["ratio_slope"]
        record("modulus-envelope", report.verdict,
               min(hi_s - slope, slope - lo_s))

        sigma = dual_modulus_curve(rho, probes)
        report = degree_envelope_check(variance(f), sigma, env_params.d)
        record("degree-envelope", report.verdict,
               report.extras["slope"] - report.extras["slope_floor"])

        cf_sub = SampleSet(s.values[: cfg["cf_samples"]], s.seed)
        curve = ecf_modulus(cf_sub, default_t_grid(lo=0.01))
        report = cf_decay_check(curve, env_params)
        slope = report.extras["ratio_slope"]
        record("cf-decay", report.verdict,
               math.inf if slope is None else report.extras["slope_tol"] - slope)

        g = add(f, scale(variable(params.n, 1), cfg["perturbation"]))
        dist = _distance_reports(f, g, cfg, int(seeds[3 * k + 2]), int(seeds[3 * k]) ^ 1)
        worst = min(
            r["rhs"] - r["lhs"] for r in dist["two_term_bound"]["probes"]
        ) if dist["two_term_bound"]["probes"] else math.inf
        record("tv-vs-kr", dist["verdict"], worst)

    verdict = all(v["passed"] == v["total"] for v in families.values())
    for name, slot in families.items():
        if slot["worst_margin"] == math.inf:
            slot["worst_margin"] = None
    summary = {
        "family": {"n": params.n, "m": params.m, "d": params.d, "count": count},
        "seed": cfg["seed"],
        "checks": families,
        "verdict": verdict,
    }
    run.write_json("summary.json", summary)
    run.finish()
    failing = [n for n, v in families.items() if v["passed"] != v["total"]]
    for name, slot in sorted(families.items()):
        print(f"{name:20s} {slot['passed']}/{slot['total']} pass")
    if failing:
        print(f"FAIL: {', '.join(failing)}")
        return EXIT_VERDICT
    print("all checks pass" if count else "empty family, nothing to check")
    return EXIT_OK


DISPATCH = {
    "variance": cmd_variance,
    "modulus": cmd_modulus,
    "cf": cmd_cf,
    "distance": cmd_distance,
    "verify-all": cmd_verify_all,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(args)
        return DISPATCH[args.command](cfg)
    except RESOLUTION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (InputError, NonpositiveDistance, PolyGaussError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
