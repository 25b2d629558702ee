"""Sparse multivariate polynomials in n real variables.

A polynomial is a dimension ``n`` plus a finite map from exponent tuples
``(j_1, ..., j_n)`` to nonzero float coefficients:

    f(x) = sum_J  a_J * x_1^{j_1} * ... * x_n^{j_n}

Canonical form never stores a zero coefficient, so the zero polynomial is
the empty map.  All values are immutable after construction and every
operation is a pure function, safe for concurrent use.

Class membership is described by ``ClassParams(n, m, d)``: each variable
enters to a power at most ``m`` and the total degree is at most ``d``.
Variable indices in the public API are 1-based (``x_1 .. x_n``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    IndexOutOfRange,
    InputError,
    ZeroPolynomial,
    ZeroScale,
)

MultiIndex = tuple[int, ...]


def _validate_terms(n: int, terms: Mapping[Sequence[int], float]) -> dict[MultiIndex, float]:
    out: dict[MultiIndex, float] = {}
    for exps, coef in terms.items():
        key = tuple(int(e) for e in exps)
        if len(key) != n:
            raise DimensionMismatch(
                f"exponent tuple {key} has length {len(key)}, expected {n}"
            )
        if any(e < 0 for e in key):
            raise InputError(f"negative exponent in {key}")
        c = float(coef)
        if not np.isfinite(c):
            raise InputError(f"non-finite coefficient {coef!r} at {key}")
        if c != 0.0:
            out[key] = out.get(key, 0.0) + c
            if out[key] == 0.0:
                del out[key]
    return out


@dataclass(frozen=True)
class Polynomial:
    """Immutable sparse polynomial in canonical form (no zero coefficients)."""

    n: int
    terms: dict[MultiIndex, float]

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"dimension must be a positive int, got {self.n!r}")
        object.__setattr__(self, "terms", _validate_terms(self.n, self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def num_terms(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"Polynomial({self.n}, 0)"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            mono = "*".join(
                f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}"
                for i, e in enumerate(exps)
                if e > 0
            )
            parts.append(f"{self.terms[exps]:g}{'*' + mono if mono else ''}")
        return f"Polynomial({self.n}, {' + '.join(parts)})"


def constant(n: int, value: float) -> Polynomial:
    """The constant polynomial ``value`` in n variables."""
    return Polynomial(n, {(0,) * n: float(value)})


def variable(n: int, i: int) -> Polynomial:
    """The coordinate polynomial ``x_i`` (1-based) in n variables."""
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"variable index {i} outside 1..{n}")
    exps = [0] * n
    exps[i - 1] = 1
    return Polynomial(n, {tuple(exps): 1.0})


def monomial(n: int, exps: Sequence[int], coef: float = 1.0) -> Polynomial:
    return Polynomial(n, {tuple(exps): coef})


@dataclass(frozen=True)
class ClassParams:
    """Structural constraints: dimension n, per-variable power cap m, total degree cap d."""

    n: int
    m: int
    d: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.m <= self.d:
            raise InputError(f"need 1 <= m <= d, got m={self.m}, d={self.d}")


def degree(f: Polynomial) -> int:
    """Total degree: the maximum of j_1 + ... + j_n over stored terms."""
    if f.is_zero:
        raise ZeroPolynomial("degree of the zero polynomial is undefined")
    return max(sum(j) for j in f.terms)


def leading_magnitude(f: Polynomial) -> tuple[float, MultiIndex]:
    """Largest |coefficient| among the top-total-degree terms, with a witness.

    Ties are broken by picking the lexicographically largest exponent tuple,
    so the witness is deterministic.
    """
    d = degree(f)
    best: tuple[float, MultiIndex] | None = None
    for exps, coef in f.terms.items():
        if sum(exps) != d:
            continue
        mag = abs(coef)
        if best is None or mag > best[0] or (mag == best[0] and exps > best[1]):
            best = (mag, exps)
    assert best is not None
    return best


def max_var_power(f: Polynomial) -> int:
    """Largest power to which any single variable enters."""
    if f.is_zero:
        raise ZeroPolynomial("max_var_power of the zero polynomial is undefined")
    return max(max(j) for j in f.terms)


def in_class(f: Polynomial, params: ClassParams) -> bool:
    return (
        f.n == params.n
        and not f.is_zero
        and max_var_power(f) <= params.m
        and degree(f) <= params.d
    )


def evaluate(f: Polynomial, x: Sequence[float]) -> float:
    """Evaluate f at a single point."""
    if len(x) != f.n:
        raise DimensionMismatch(f"point has length {len(x)}, expected {f.n}")
    total = 0.0
    for exps, coef in f.terms.items():
        term = coef
        for xi, e in zip(x, exps):
            if e:
                term *= float(xi) ** e
        total += term
    return total


def evaluate_batch(f: Polynomial, x: np.ndarray) -> np.ndarray:
    """Evaluate f at each row of an (N, n) array.

    Per-variable powers are cached up to the maximum needed exponent, so the
    cost is O(num_terms * n * N) multiplies.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != f.n:
        raise DimensionMismatch(f"batch shape {x.shape} incompatible with n={f.n}")
    if f.is_zero:
        return np.zeros(x.shape[0])
    max_pow = [0] * f.n
    for exps in f.terms:
        for i, e in enumerate(exps):
            max_pow[i] = max(max_pow[i], e)
    pows: list[list[np.ndarray | None]] = []
    for i in range(f.n):
        col: list[np.ndarray | None] = [None] * (max_pow[i] + 1)
        if max_pow[i] >= 1:
            col[1] = x[:, i]
            for e in range(2, max_pow[i] + 1):
                col[e] = col[e - 1] * x[:, i]
        pows.append(col)
    out = np.zeros(x.shape[0])
    for exps, coef in f.terms.items():
        term = np.full(x.shape[0], coef)
        for i, e in enumerate(exps):
            if e:
                term = term * pows[i][e]
        out += term
    return out


def add(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.n != g.n:
        raise DimensionMismatch(f"dimensions differ: {f.n} vs {g.n}")
    terms = dict(f.terms)
    for exps, coef in g.terms.items():
        terms[exps] = terms.get(exps, 0.0) + coef
    return Polynomial(f.n, terms)


def scale(f: Polynomial, alpha: float) -> Polynomial:
    """Multiply every coefficient by a nonzero scalar."""
    alpha = float(alpha)
    if alpha == 0.0:
        raise ZeroScale("scaling by zero is rejected")
    return Polynomial(f.n, {exps: alpha * c for exps, c in f.terms.items()})


def multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    """Distributive product in canonical sparse form."""
    if f.n != g.n:
        raise DimensionMismatch(f"dimensions differ: {f.n} vs {g.n}")
    terms: dict[MultiIndex, float] = {}
    for ea, ca in f.terms.items():
        for eb, cb in g.terms.items():
            key = tuple(a + b for a, b in zip(ea, eb))
            terms[key] = terms.get(key, 0.0) + ca * cb
    return Polynomial(f.n, terms)


def partial_derivative(f: Polynomial, i: int) -> Polynomial:
    """Formal derivative with respect to x_i (1-based)."""
    if not 1 <= i <= f.n:
        raise IndexOutOfRange(f"variable index {i} outside 1..{f.n}")
    k = i - 1
    terms: dict[MultiIndex, float] = {}
    for exps, coef in f.terms.items():
        e = exps[k]
        if e == 0:
            continue
        key = exps[:k] + (e - 1,) + exps[k + 1 :]
        terms[key] = terms.get(key, 0.0) + coef * e
    return Polynomial(f.n, terms)


def restrict_variable(f: Polynomial, i: int) -> list[Polynomial]:
    """Collect f by powers of x_i: f = sum_j  f_j(x_without_i) * x_i^j.

    Returns the list (f_0, ..., f_J) of polynomials in n-1 variables, where
    J is the largest power of x_i present.  Summing them back against x_i^j
    reconstructs f identically.
    """
    if f.n < 2:
        raise DimensionTooSmall("restriction needs at least 2 variables")
    if not 1 <= i <= f.n:
        raise IndexOutOfRange(f"variable index {i} outside 1..{f.n}")
    if f.is_zero:
        raise ZeroPolynomial("restriction of the zero polynomial is undefined")
    k = i - 1
    top = max(exps[k] for exps in f.terms)
    layers: list[dict[MultiIndex, float]] = [{} for _ in range(top + 1)]
    for exps, coef in f.terms.items():
        reduced = exps[:k] + exps[k + 1 :]
        layer = layers[exps[k]]
        layer[reduced] = layer.get(reduced, 0.0) + coef
    return [Polynomial(f.n - 1, layer) for layer in layers]


def random_in_class(
    params: ClassParams,
    seed: int,
    law: str = "uniform",
    max_terms: int = 12,
) -> Polynomial:
    """Draw a random polynomial from the (n, m, d) class, deterministic per seed.

    The default law picks a random subset of admissible exponent tuples,
    draws coefficients uniformly on [-1, 1], and rescales so that the
    leading magnitude equals 1.  Degenerate draws (constant, or with a
    vanishing leading coefficient) are retried with a perturbed seed.
    """
    if law != "uniform":
        raise InputError(f"unknown coefficient law {law!r}")
    admissible = [
        exps
        for exps in itertools.product(range(params.m + 1), repeat=params.n)
        if 0 < sum(exps) <= params.d
    ]
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    pool = min(max_terms, len(admissible))
    for _ in range(100):
        k = int(rng.integers(min(2, pool), pool + 1))
        chosen = rng.choice(len(admissible), size=k, replace=False)
        terms: dict[MultiIndex, float] = {}
        for idx in chosen:
            terms[admissible[int(idx)]] = float(rng.uniform(-1.0, 1.0))
        if rng.uniform() < 0.5:
            terms[(0,) * params.n] = float(rng.uniform(-1.0, 1.0))
        f = Polynomial(params.n, terms)
        if f.is_zero or degree(f) < 1:
            continue
        lead, _ = leading_magnitude(f)
        if lead < 1e-6:
            continue
        return scale(f, 1.0 / lead)
    raise InputError("could not draw a non-degenerate polynomial in 100 tries")


# --- JSON wire format: {"n": int, "terms": [{"exp": [j1, ..., jn], "coef": c}]} ---


def to_json_dict(f: Polynomial) -> dict:
    return {
        "n": f.n,
        "terms": [
            {"exp": list(exps), "coef": f.terms[exps]} for exps in sorted(f.terms)
        ],
    }


def from_json_dict(data: Mapping) -> Polynomial:
    try:
        n = int(data["n"])
        raw = data["terms"]
        terms = {tuple(int(e) for e in t["exp"]): float(t["coef"]) for t in raw}
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed polynomial object: {exc}") from exc
    try:
        return Polynomial(n, terms)
    except (DimensionMismatch, InputError) as exc:
        raise InputError(str(exc)) from exc


def dumps(f: Polynomial) -> str:
    return json.dumps(to_json_dict(f), sort_keys=True)


def loads(text: str) -> Polynomial:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid polynomial JSON: {exc}") from exc
    return from_json_dict(data)
