"""Minimal polynomial approximations of the activation families.

Each family is expanded about zero and truncated to the fewest terms whose
certified error stays inside a 1% budget over the evaluation range. The
error metric is the certified maximum absolute deviation, normalized by the
peak-to-peak span of the exact function over the range:

    err(series) = max(grid_err, remainder_bound) / (max f - min f)

where grid_err is a 4097-point scan and remainder_bound is the
first-omitted-term bound available for the alternating series (sine,
Gaussian, sinc, and the substituted variable-period sine). A grid scan
alone cannot certify a maximum; the alternating-series remainder can.

Special constructions:

* the Gabor wavelet cos(x)*exp(-x**2) is built by convolving the cosine and
  Gaussian expansions (exact Maclaurin coefficients of the product) and
  truncating the composite polynomial;
* the variable-period sine is expanded in z = (|x|+1)*x and reported in z;
* the piecewise quadratic is stored as its exact positive branch 2x - x**2
  (two terms, zero error); evaluation applies the odd symmetry
  phi(-x) = -phi(x).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .activations import ActivationKind, Family, af_eval

GRID_POINTS = 4097
MAX_TERMS = 64
DEFAULT_BUDGET = 0.01


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"


class Variable(enum.Enum):
    X = "x"
    Z = "z"


class ConvergenceError(RuntimeError):
    """Raised when no series within MAX_TERMS meets the error budget."""


@dataclass(frozen=True)
class TaylorSeries:
    """A single-parity polynomial with a certified error on its range."""

    family: Family
    parity: Parity
    coeffs: tuple[tuple[int, float], ...]  # (degree, value), degrees ascending
    variable: Variable
    range_half_width: float
    max_err: float
    term_count: int

    def __post_init__(self):
        degs = [d for d, _ in self.coeffs]
        if degs != sorted(degs) or len(set(degs)) != len(degs):
            raise ValueError("degrees must be strictly increasing")
        if self.parity is Parity.EVEN and any(d % 2 for d in degs):
            raise ValueError("even series may only hold even degrees")
        if self.parity is Parity.ODD and any(d % 2 == 0 for d in degs):
            raise ValueError("odd series may only hold odd degrees")
        nonzero = sum(1 for _, c in self.coeffs if c != 0.0)
        if self.term_count != nonzero:
            raise ValueError("term_count must equal the nonzero coefficient count")

    @property
    def max_degree(self) -> int:
        return self.coeffs[-1][0]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.coeffs)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.coeffs)


def _sine_coeffs(terms: int) -> list[tuple[int, float]]:
    return [(2 * k + 1, (-1.0) ** k / math.factorial(2 * k + 1)) for k in range(terms)]


def _gauss_coeffs(terms: int) -> list[tuple[int, float]]:
    return [(2 * k, (-1.0) ** k / math.factorial(k)) for k in range(terms)]


def _sinc_coeffs(terms: int) -> list[tuple[int, float]]:
    # numerator sine series divided termwise by x
    return [(2 * k, (-1.0) ** k / math.factorial(2 * k + 1)) for k in range(terms)]


def _cos_coeffs(terms: int) -> list[tuple[int, float]]:
    return [(2 * k, (-1.0) ** k / math.factorial(2 * k)) for k in range(terms)]


def wire_composite_coeffs(terms: int) -> list[tuple[int, float]]:
    """First ``terms`` Maclaurin coefficients of cos(x)*exp(-x**2).

    Built by convolving cosine and Gaussian factor expansions taken far
    enough that every kept product coefficient is exact.
    """
    order = terms  # factors to x**(2*(terms-1)) each cover the kept degrees
    g = _gauss_coeffs(order)
    c = _cos_coeffs(order)
    acc: dict[int, float] = {}
    for dg, vg in g:
        for dc, vc in c:
            acc[dg + dc] = acc.get(dg + dc, 0.0) + vg * vc
    return [(d, acc[d]) for d in sorted(acc) if d <= 2 * (terms - 1)]


def taylor_coeffs(kind: ActivationKind | Family, terms: int,
                  range_half_width: float | None = None) -> TaylorSeries:
    """Exact expansion coefficients for ``terms`` series terms.

    The error field is filled lazily by ``max_norm_error`` / ``min_terms``;
    here it is set to nan except for the exact quadratic.
    """
    if isinstance(kind, ActivationKind):
        family = kind.family
        rhw = kind.range_half_width if range_half_width is None else range_half_width
    else:
        family = kind
        rhw = 2.0 if range_half_width is None else range_half_width
    if terms < 1:
        raise ValueError("terms must be >= 1")

    if family is Family.QUAD:
        if terms != 2:
            raise ValueError("the quadratic branch polynomial has exactly 2 terms")
        return TaylorSeries(family, Parity.MIXED, ((1, 2.0), (2, -1.0)),
                            Variable.X, rhw, 0.0, 2)
    if family is Family.SINE:
        coeffs, parity, var = _sine_coeffs(terms), Parity.ODD, Variable.X
    elif family is Family.GAUSSIAN:
        coeffs, parity, var = _gauss_coeffs(terms), Parity.EVEN, Variable.X
    elif family is Family.SINC:
        coeffs, parity, var = _sinc_coeffs(terms), Parity.EVEN, Variable.X
    elif family is Family.FINER:
        coeffs, parity, var = _sine_coeffs(terms), Parity.ODD, Variable.Z
    elif family is Family.WIRE:
        coeffs, parity, var = wire_composite_coeffs(terms), Parity.EVEN, Variable.X
    else:
        raise ValueError(f"no polynomial expansion for family {family.value!r}")
    return TaylorSeries(family, parity, tuple(coeffs), var, rhw,
                        float("nan"), sum(1 for _, c in coeffs if c != 0.0))


def series_eval(series: TaylorSeries, x):
    """Evaluate the polynomial in float64 (z-substitution and quad symmetry
    applied as the series requires)."""
    arr = np.asarray(x, dtype=np.float64)
    if series.family is Family.QUAD:
        a = np.abs(arr)
        out = np.sign(arr) * (2.0 * a - a * a)
        return float(out) if arr.ndim == 0 else out
    v = (np.abs(arr) + 1.0) * arr if series.variable is Variable.Z else arr
    out = np.zeros_like(v)
    for d, c in series.coeffs:
        out = out + c * v ** d
    return float(out) if arr.ndim == 0 else out


def _remainder_bound(series: TaylorSeries) -> float:
    """First-omitted-term bound at the range end for alternating Maclaurin
    series; inf-unavailable families return 0 (grid error rules alone)."""
    r = series.range_half_width
    n = len(series.coeffs)
    fam = series.family
    if fam is Family.SINE:
        return r ** (2 * n + 1) / math.factorial(2 * n + 1)
    if fam is Family.GAUSSIAN:
        return r ** (2 * n) / math.factorial(n)
    if fam is Family.SINC:
        return r ** (2 * n) / math.factorial(2 * n + 1)
    if fam is Family.FINER:
        z = (abs(r) + 1.0) * r
        return z ** (2 * n + 1) / math.factorial(2 * n + 1)
    return 0.0


def max_norm_error(series: TaylorSeries, kind: ActivationKind | Family | None = None) -> float:
    """Certified max error over the range, normalized by the exact
    function's peak-to-peak span on the evaluation grid."""
    family = series.family if kind is None else (
        kind.family if isinstance(kind, ActivationKind) else kind)
    if family is not series.family:
        raise ValueError("series/family mismatch")
    r = series.range_half_width
    grid = np.linspace(-r, r, GRID_POINTS)
    exact = af_eval(family, grid)
    approx = series_eval(series, grid)
    grid_err = float(np.max(np.abs(approx - exact)))
    certified = max(grid_err, _remainder_bound(series))
    span = float(np.max(exact) - np.min(exact))
    return certified / span


def min_terms(kind: ActivationKind | Family, range_half_width: float | None = None,
              budget: float = DEFAULT_BUDGET) -> TaylorSeries:
    """Smallest accepted expansion for the family on the range."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    if isinstance(kind, ActivationKind):
        family = kind.family
        rhw = kind.range_half_width if range_half_width is None else range_half_width
    else:
        family = kind
        rhw = 2.0 if range_half_width is None else range_half_width

    if family is Family.QUAD:
        return taylor_coeffs(family, 2, rhw)

    for n in range(1, MAX_TERMS + 1):
        series = taylor_coeffs(family, n, rhw)
        err = max_norm_error(series)
        if err <= budget:
            return TaylorSeries(series.family, series.parity, series.coeffs,
                                series.variable, rhw, err, series.term_count)
    raise ConvergenceError(
        f"{family.value} did not meet budget {budget} within {MAX_TERMS} terms "
        f"on [-{rhw}, {rhw}]"
    )
