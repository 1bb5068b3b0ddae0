"""Continuum (L -> infinity) random-walk quantities for the sup-norm ball.

``U`` is the uniform density on ``[-1, 1]^d``; its n-fold convolution
factorizes over axes, so ``U^{*n}(o) = (f_n(n/2) / 2)^d`` where ``f_n`` is
the Irwin-Hall density (sum of ``n`` uniforms on ``[0, 1]``).

The constants

    C_LT = sum_{n>=2} (n+1)/(2e) U^{*n}(o)
    C_LA = C_LT - 1/(2e^2) sum_{n>=3} U^{*n}(o)

are assembled from exact rational partial sums; ``e`` enters only at the
end.  Because the terms decay like ``n^{-d/2}`` the omitted tail is
estimated by a power-law fit (see ``exact.power_law_tail``) and added to
the returned value, with the fit uncertainty reported as the error.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from .exact import EPoly, power_law_tail

MODELS = ("trees", "animals")
MODEL_ALIASES = {"lt": "trees", "trees": "trees", "la": "animals", "animals": "animals"}


class ContinuumError(ValueError):
    pass


def normalize_model(model: str) -> str:
    try:
        return MODEL_ALIASES[model.lower()]
    except (KeyError, AttributeError):
        raise ValueError(f"unknown model {model!r}; use lt/trees or la/animals") from None


@lru_cache(maxsize=None)
def irwin_hall_center(n: int) -> Fraction:
    """Exact Irwin-Hall density ``f_n(n/2)``."""
    if n < 1:
        raise ContinuumError(f"n must be >= 1, got {n}")
    if n == 1:
        return Fraction(1)
    total = sum(
        (-1) ** k * math.comb(n, k) * Fraction(n - 2 * k, 2) ** (n - 1) for k in range(n // 2 + 1)
    )
    return total / math.factorial(n - 1)


def ustar_origin(n: int, d: int, exact: bool = True) -> Fraction | float:
    """``U^{*n}(o)`` for the uniform density on ``[-1, 1]^d``."""
    if d < 1:
        raise ContinuumError(f"d must be >= 1, got {d}")
    value = (irwin_hall_center(n) / 2) ** d
    return value if exact else float(value)


@dataclass(frozen=True)
class SeriesConstant:
    """A constant ``exact_partial + tail`` with ``exact_partial`` kept exact."""

    exact_partial: EPoly
    tail: float
    error: float
    n_max: int

    @property
    def partial(self) -> float:
        return float(self.exact_partial)

    @property
    def value(self) -> float:
        return float(self.exact_partial.to_mpf() + self.tail)

    def __iter__(self):
        # unpacks as (value, truncation_error)
        yield self.value
        yield self.error


def _check_d(d: int) -> None:
    if d <= 4:
        raise ContinuumError(f"random-walk constants need d >= 5, got d={d}")


def _tail(terms_from: int, n_max: int, coeff, d: int, growth: int) -> tuple[float, float]:
    k = 8
    first = max(terms_from, n_max - k + 1)
    terms = [coeff(n) * ustar_origin(n, d) for n in range(first, n_max + 1)]
    return power_law_tail(terms, n_max, d / 2 - growth)


def c_lt(d: int, n_max: int = 200) -> SeriesConstant:
    """``C_LT`` (partial sum to ``n_max`` plus fitted tail) and its error."""
    _check_d(d)
    if n_max < 10:
        raise ContinuumError(f"n_max must be >= 10, got {n_max}")
    weight = lambda n: Fraction(n + 1, 2)
    partial = sum((weight(n) * ustar_origin(n, d) for n in range(2, n_max + 1)), Fraction(0))
    tail, err = _tail(2, n_max, weight, d, 1)
    e = float(mpmath.e)
    return SeriesConstant(EPoly.rational(partial, -1), tail / e, err / e, n_max)


def la_correction(d: int, n_max: int = 200) -> SeriesConstant:
    """``1/(2e^2) sum_{n>=3} U^{*n}(o)``, the amount subtracted from ``C_LT``."""
    _check_d(d)
    if n_max < 10:
        raise ContinuumError(f"n_max must be >= 10, got {n_max}")
    partial = sum((ustar_origin(n, d) for n in range(3, n_max + 1)), Fraction(0))
    tail, err = _tail(3, n_max, lambda n: Fraction(1), d, 0)
    scale = float(2 * mpmath.e**2)
    return SeriesConstant(EPoly.rational(partial / 2, -2), tail / scale, err / scale, n_max)


@dataclass(frozen=True)
class CLAResult:
    constant: SeriesConstant
    correction: SeriesConstant

    @property
    def value(self) -> float:
        return self.constant.value

    @property
    def error(self) -> float:
        return self.constant.error

    def __iter__(self):
        yield self.value
        yield self.error


def c_la(d: int, n_max: int = 200) -> CLAResult:
    """``C_LA`` and the separately reported correction term."""
    lt = c_lt(d, n_max)
    corr = la_correction(d, n_max)
    const = SeriesConstant(
        lt.exact_partial - corr.exact_partial,
        lt.tail - corr.tail,
        lt.error + corr.error,
        n_max,
    )
    return CLAResult(const, corr)


def model_constant(model: str, d: int, n_max: int = 200) -> SeriesConstant:
    model = normalize_model(model)
    return c_lt(d, n_max) if model == "trees" else c_la(d, n_max).constant


def predict_pc(model: str, d: int, L: int, n_max: int = 200, constant: float | None = None) -> float:
    """``1/e + C L^{-d}``; the ``O(L^{-d-1})`` remainder is not quantified."""
    model = normalize_model(model)
    if L < 1:
        raise ContinuumError(f"L must be >= 1, got {L}")
    _check_d(d)
    if d <= 8:
        warnings.warn(
            f"d={d}: the expansion is computable but only established for d > 8",
            RuntimeWarning,
            stacklevel=2,
        )
    if constant is None:
        constant = model_constant(model, d, n_max).value
    return float(1 / mpmath.e + mpmath.mpf(constant) / mpmath.mpf(L) ** d)


@dataclass(frozen=True)
class ConstantsReport:
    d: int
    n_max: int
    u_table: tuple[Fraction, ...]  # U^{*n}(o), n = 1..n_max
    c_lt: float
    c_la: float
    c_lt_partial: float
    la_correction: float
    truncation_error: float
    pc_predictions: tuple[tuple[int, str, float], ...] = field(default_factory=tuple)
    remainder: str = "O(L^{-d-1}), not quantified"


def constants_report(d: int, n_max: int = 200, L_values=()) -> ConstantsReport:
    lt = c_lt(d, n_max)
    la = c_la(d, n_max)
    preds = []
    if d <= 8 and L_values:
        warnings.warn(
            f"d={d}: p_c predictions are computable but only established for d > 8",
            RuntimeWarning,
            stacklevel=2,
        )
    with warnings.catch_warnings():
        # one warning for the whole sweep, not one per L
        warnings.simplefilter("ignore", RuntimeWarning)
        for L in L_values:
            for model, const in (("trees", lt.value), ("animals", la.value)):
                preds.append((L, model, predict_pc(model, d, L, constant=const)))
    return ConstantsReport(
        d=d,
        n_max=n_max,
        u_table=tuple(ustar_origin(n, d) for n in range(1, n_max + 1)),
        c_lt=lt.value,
        c_la=la.value,
        c_lt_partial=lt.partial,
        la_correction=la.correction.value,
        truncation_error=lt.error + la.correction.error,
        pc_predictions=tuple(preds),
    )
