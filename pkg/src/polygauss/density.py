"""Monte Carlo sampling of f(X) and gridded density estimates.

A ``GriddedDensity`` is the numeric stand-in for the distribution density:
a uniform grid of cells ``[lo + i*step, lo + (i+1)*step)`` whose values are
cell-averaged density (nonnegative, with ``step * sum(values)`` equal to the
covered probability mass, at least ``1 - 1e-3``).  Cell averaging, rather
than point sampling, keeps the mass identity exact even for densities with
integrable singularities (e.g. the chi-square(1) blow-up at zero).

Sampling is deterministic and reproducible: the stream is a Philox counter-
based generator keyed through ``numpy.random.SeedSequence(seed).spawn``, one
substream per fixed-size chunk of the output, with normals drawn by numpy's
ziggurat method.  Results are bit-identical for any worker count because
chunk boundaries are fixed and chunks are reassembled in index order.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import ndtr, roots_legendre

from .errors import DegenerateRange, InputError, UnsupportedKind
from .poly import Polynomial, evaluate_batch, from_json_dict, to_json_dict

SAMPLE_CHUNK = 1 << 20
MASS_TOL = 1e-3
TAIL_QUANTILE = 1e-4


@dataclass(frozen=True)
class SampleSet:
    """I.i.d. realizations of f(X) with seed provenance."""

    values: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def count(self) -> int:
        return int(self.values.shape[0])


def sample(
    f: Polynomial, n_samples: int, seed: int, workers: int = 1
) -> SampleSet:
    """Draw ``n_samples`` i.i.d. values of f(X), X standard normal in R^n.

    The output depends only on (f, seed, n_samples); ``workers`` controls
    parallelism of the fixed chunks, never the values.
    """
    if n_samples < 1:
        raise InputError(f"need at least one sample, got {n_samples}")
    n_chunks = (n_samples + SAMPLE_CHUNK - 1) // SAMPLE_CHUNK
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    def draw(i: int) -> np.ndarray:
        lo = i * SAMPLE_CHUNK
        size = min(SAMPLE_CHUNK, n_samples - lo)
        gen = np.random.Generator(np.random.Philox(children[i]))
        z = gen.standard_normal((size, f.n))
        return evaluate_batch(f, z)

    if workers <= 1 or n_chunks == 1:
        parts = [draw(i) for i in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(draw, range(n_chunks)))
    return SampleSet(np.concatenate(parts) if len(parts) > 1 else parts[0], seed)


@dataclass(frozen=True)
class GriddedDensity:
    """Cell-averaged density on a uniform grid.

    clipped_mass: probability mass outside the grid (tail truncation).
    l1_noise:     Monte Carlo L1 noise estimate from seed-split halves
                  (zero for closed-form densities).
    bandwidth:    kernel bandwidth when produced by the KDE estimator.
    """

    lo: float
    step: float
    values: np.ndarray
    clipped_mass: float = 0.0
    l1_noise: float = 0.0
    bandwidth: float | None = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] < 2:
            raise InputError(f"density grid needs >= 2 cells, got shape {vals.shape}")
        if not np.isfinite(self.step) or self.step <= 0:
            raise InputError(f"step must be positive, got {self.step}")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise InputError("density values must be finite and nonnegative")
        mass = self.step * float(vals.sum())
        if not (1.0 - MASS_TOL <= mass <= 1.0 + 1e-9):
            raise InputError(f"density mass {mass:.6f} outside [{1 - MASS_TOL}, 1]")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return int(self.values.shape[0])

    @property
    def hi(self) -> float:
        return self.lo + self.step * self.size

    @property
    def mass(self) -> float:
        return self.step * float(self.values.sum())

    def centers(self) -> np.ndarray:
        return self.lo + self.step * (np.arange(self.size) + 0.5)

    def total_variation(self) -> float:
        """Variation of the piecewise-constant density, including the drops
        to zero at both grid ends (a discretization-bias proxy)."""
        v = self.values
        return float(v[0] + np.abs(np.diff(v)).sum() + v[-1])

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            fh.write("grid_point,value\n")
            for c, v in zip(self.centers(), self.values):
                fh.write(f"{float(c):.17g},{float(v):.17g}\n")


def _quantile_grid(values: np.ndarray, size: int) -> tuple[float, float]:
    q_lo, q_hi = np.quantile(values, [TAIL_QUANTILE, 1.0 - TAIL_QUANTILE])
    if q_hi <= q_lo:
        raise DegenerateRange("samples are (nearly) constant; no grid range")
    step = (q_hi - q_lo) / (size - 4)
    return float(q_lo - 2.0 * step), float(step)


def _histogram(values: np.ndarray, lo: float, step: float, size: int) -> np.ndarray:
    idx = np.floor((values - lo) / step).astype(np.int64)
    keep = (idx >= 0) & (idx < size)
    return np.bincount(idx[keep], minlength=size).astype(np.float64)


def histogram_density(
    s: SampleSet,
    size: int = 400,
    lo: float | None = None,
    hi: float | None = None,
) -> GriddedDensity:
    """Histogram estimate on ``size`` cells.

    The default range spans the [1e-4, 1 - 1e-4] sample quantiles padded by
    two cells; mass falling outside is reported as ``clipped_mass``.  An
    explicit (lo, hi) overrides the quantile policy (used to put two sample
    sets on a common grid).  The L1 noise estimate comes from histogramming
    the two halves of the sample separately.
    """
    if size < 16:
        raise InputError(f"need at least 16 cells, got {size}")
    if s.count < 10 * size:
        raise InputError(f"need >= {10 * size} samples for {size} cells, got {s.count}")
    vals = s.values
    if lo is None or hi is None:
        glo, step = _quantile_grid(vals, size)
    else:
        if not hi > lo:
            raise InputError(f"empty range [{lo}, {hi}]")
        glo, step = float(lo), (float(hi) - float(lo)) / size
    counts = _histogram(vals, glo, step, size)
    n = s.count
    clipped = 1.0 - counts.sum() / n
    half = n // 2
    h1 = _histogram(vals[:half], glo, step, size) / (half * step)
    h2 = _histogram(vals[half:], glo, step, size) / ((n - half) * step)
    noise = 0.5 * step * float(np.abs(h1 - h2).sum())
    return GriddedDensity(
        glo, step, counts / (n * step), clipped_mass=float(clipped), l1_noise=noise
    )


def silverman_bandwidth(values: np.ndarray) -> float:
    std = float(np.std(values))
    q25, q75 = np.quantile(values, [0.25, 0.75])
    scale = min(std, (q75 - q25) / 1.34) if q75 > q25 else std
    if scale <= 0:
        raise DegenerateRange("zero spread; no bandwidth")
    return 0.9 * scale * values.shape[0] ** (-0.2)


def kde_density(
    s: SampleSet,
    size: int = 400,
    bandwidth: float | str = "auto",
) -> GriddedDensity:
    """Gaussian-kernel estimate on a uniform grid.

    Data are binned first and convolved with a discretely normalized kernel;
    kernel mass smoothed past the grid ends (hard support boundaries) is
    put back by a flat renormalization, so the mass identity holds for any
    bandwidth.  ``bandwidth="auto"`` uses Silverman's rule
    0.9 * min(std, IQR/1.34) * N^(-1/5).
    """
    if size < 16:
        raise InputError(f"need at least 16 cells, got {size}")
    if s.count < 10 * size:
        raise InputError(f"need >= {10 * size} samples for {size} cells, got {s.count}")
    bw = silverman_bandwidth(s.values) if bandwidth == "auto" else float(bandwidth)
    if bw <= 0:
        raise InputError(f"bandwidth must be positive, got {bw}")
    lo, step = _quantile_grid(s.values, size)
    counts = _histogram(s.values, lo, step, size)
    clipped = 1.0 - counts.sum() / s.count
    reach = max(1, int(np.ceil(6.0 * bw / step)))
    offsets = np.arange(-reach, reach + 1) * step
    kernel = np.exp(-0.5 * (offsets / bw) ** 2)
    kernel /= kernel.sum()

    def smooth(c: np.ndarray, total: int) -> np.ndarray:
        dens = np.convolve(c, kernel, mode="same") / (total * step)
        covered = c.sum() / total
        mass = step * dens.sum()
        return dens * (covered / mass) if mass > 0 else dens

    dens = smooth(counts, s.count)
    half = s.count // 2
    d1 = smooth(_histogram(s.values[:half], lo, step, size), half)
    d2 = smooth(_histogram(s.values[half:], lo, step, size), s.count - half)
    noise = 0.5 * step * float(np.abs(d1 - d2).sum())
    return GriddedDensity(
        lo, step, dens, clipped_mass=float(clipped), l1_noise=noise, bandwidth=bw
    )


# --- Closed-form reference densities ---------------------------------------


def _normal_cell_mass(edges: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    return np.diff(ndtr((edges - mu) / sigma))


def _chisq1_cdf(x: np.ndarray) -> np.ndarray:
    x = np.maximum(x, 0.0)
    return 2.0 * ndtr(np.sqrt(x)) - 1.0


_EULER_GAMMA = 0.5772156649015329
_GL_NODES, _GL_WEIGHTS = roots_legendre(160)
_SERIES_CAP = 0.05


def product_normal_pdf(x: np.ndarray) -> np.ndarray:
    """Density of X1*X2 for independent standard normals, by quadrature.

    Uses rho(x) = (1/pi) * integral over u of exp(-(e^{2u} + x^2 e^{-2u})/2),
    the defining convolution integral after substituting u for the log of the
    integration variable; the integrand is exp(-|x| cosh(2u)) centered at
    u = log(sqrt|x|), evaluated with Gauss-Legendre nodes wide enough that
    the tail weight is below 1e-17.  Diverges logarithmically at x = 0.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    ax = np.abs(x)
    out = np.full(ax.shape, np.inf)
    pos = ax > 0.0
    if pos.any():
        a = ax[pos]
        u_half = 0.5 * np.arccosh(np.maximum(44.0 / a, 1.0 + 1e-12))
        u = u_half[:, None] * _GL_NODES[None, :]
        vals = np.exp(-a[:, None] * np.cosh(2.0 * u)).dot(_GL_WEIGHTS)
        out[pos] = u_half * vals / np.pi
    return out


def _product_normal_cum_small(u: np.ndarray) -> np.ndarray:
    """integral_0^u of the product-normal density by series, u <= ~0.05."""
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    pos = u > 0
    up = u[pos]
    lg = np.log(2.0 / up)
    out[pos] = (
        up * (lg + 1.0 - _EULER_GAMMA)
        + up ** 3 / 12.0 * (lg + 4.0 / 3.0 - _EULER_GAMMA)
    ) / np.pi
    return out


def _product_normal_cell_mass(edges: np.ndarray) -> np.ndarray:
    """Per-cell mass: series cumulative near the log singularity at zero,
    Simpson on the quadrature pdf elsewhere."""
    a, b = edges[:-1], edges[1:]
    near = (np.abs(a) <= _SERIES_CAP) & (np.abs(b) <= _SERIES_CAP)
    straddle = (a < 0) & (b > 0)
    use_series = near | straddle
    cum_a = np.sign(a) * _product_normal_cum_small(np.abs(a))
    cum_b = np.sign(b) * _product_normal_cum_small(np.abs(b))
    mass = np.where(use_series, cum_b - cum_a, 0.0)
    rest = ~use_series
    if rest.any():
        fa = product_normal_pdf(a[rest])
        fb = product_normal_pdf(b[rest])
        fm = product_normal_pdf(0.5 * (a[rest] + b[rest]))
        mass[rest] = (b[rest] - a[rest]) / 6.0 * (fa + 4.0 * fm + fb)
    return mass


def oracle_density(
    kind: str,
    lo: float,
    hi: float,
    size: int,
    mu: float = 0.0,
    sigma: float = 1.0,
) -> GriddedDensity:
    """Cell-averaged closed-form density on an explicit grid.

    kinds: "normal" (params mu, sigma), "chisq1" (the law of X^2), and
    "product_normal" (the law of X1*X2).  The grid must cover all but at
    most 1e-3 of the mass.
    """
    if size < 2:
        raise InputError(f"need at least 2 cells, got {size}")
    if not hi > lo:
        raise InputError(f"empty range [{lo}, {hi}]")
    edges = lo + (hi - lo) * np.arange(size + 1) / size
    step = (hi - lo) / size
    if kind == "normal":
        if sigma <= 0:
            raise InputError(f"sigma must be positive, got {sigma}")
        mass = _normal_cell_mass(edges, mu, sigma)
    elif kind == "chisq1":
        mass = np.diff(_chisq1_cdf(edges))
    elif kind == "product_normal":
        mass = _product_normal_cell_mass(edges)
    else:
        raise UnsupportedKind(f"unknown density kind {kind!r}")
    covered = float(mass.sum())
    return GriddedDensity(
        float(lo), float(step), np.maximum(mass, 0.0) / step,
        clipped_mass=max(0.0, 1.0 - covered),
    )


def affine_density(rho: GriddedDensity, scale: float, shift: float = 0.0) -> GriddedDensity:
    """Exact density of scale*W + shift when W has density ``rho``.

    Cells map to cells under an affine map, so cell averages transform
    exactly: value' = value / |scale| on the image grid.
    """
    a = float(scale)
    if a == 0.0 or not np.isfinite(a):
        raise InputError(f"scale must be nonzero finite, got {scale}")
    if a > 0:
        lo = a * rho.lo + shift
        vals = rho.values / a
    else:
        lo = a * rho.hi + shift
        vals = rho.values[::-1] / (-a)
    return GriddedDensity(
        float(lo), abs(a) * rho.step, vals,
        clipped_mass=rho.clipped_mass, l1_noise=rho.l1_noise,
    )


def resample_density(
    rho: GriddedDensity, lo: float, step: float, size: int
) -> np.ndarray:
    """Linear interpolation of cell values onto another uniform grid (zero
    outside the source grid).  Returns raw values, not a GriddedDensity."""
    targets = lo + step * (np.arange(size) + 0.5)
    return np.interp(targets, rho.centers(), rho.values, left=0.0, right=0.0)


# --- Empirical CDF ----------------------------------------------------------


class EmpiricalCdf:
    """Right-continuous empirical CDF, queryable at any real point."""

    def __init__(self, s: SampleSet):
        self._sorted = np.sort(s.values)
        self._n = s.count

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        r = np.searchsorted(self._sorted, x, side="right") / self._n
        return float(r) if np.isscalar(x) else r

    def interval_prob(self, a: float, b: float) -> float:
        """Empirical probability of the interval (a, b]."""
        if b < a:
            raise InputError(f"interval endpoints out of order: ({a}, {b}]")
        return float(self(b) - self(a))


def ecdf(s: SampleSet) -> EmpiricalCdf:
    return EmpiricalCdf(s)


# --- Persistence ------------------------------------------------------------


def save_samples(
    s: SampleSet, path: str | Path, polynomial: Polynomial | None = None
) -> None:
    """Write little-endian float64 values plus a JSON sidecar
    {seed, N, polynomial} next to them."""
    path = Path(path)
    path.write_bytes(s.values.astype("<f8").tobytes())
    sidecar = {
        "seed": s.seed,
        "N": s.count,
        "polynomial": to_json_dict(polynomial) if polynomial is not None else None,
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n"
    )


def load_samples(path: str | Path) -> tuple[SampleSet, Polynomial | None]:
    path = Path(path)
    try:
        sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        values = np.frombuffer(path.read_bytes(), dtype="<f8")
        seed = int(sidecar["seed"])
        n = int(sidecar["N"])
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise InputError(f"cannot load sample set from {path}: {exc}") from exc
    if values.shape[0] != n:
        raise InputError(f"sidecar says N={n} but file holds {values.shape[0]} values")
    poly = from_json_dict(sidecar["polynomial"]) if sidecar.get("polynomial") else None
    return SampleSet(values.astype(np.float64), seed), poly
