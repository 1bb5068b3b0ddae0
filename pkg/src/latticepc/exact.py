"""Exact helpers shared by the numerical modules.

``EPoly`` keeps quantities of the form ``sum_k c_k * e**k`` with rational
``c_k`` so that identities which only differ by powers of ``e`` can be
checked as exact equalities.  ``power_law_tail`` estimates the omitted mass
of a series whose terms decay like ``n**-s`` times a power series in ``1/n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath

_DPS = 60


def to_mpf(q: Fraction | int) -> mpmath.mpf:
    with mpmath.workdps(_DPS):
        return mpmath.mpf(q.numerator) / q.denominator


def frac_str(q: Fraction) -> str:
    """Render as ``num/den`` (always with a denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def decimal_str(x, digits: int = 15) -> str:
    if x == 0:
        return "0"
    if isinstance(x, Fraction):
        x = to_mpf(x)
    with mpmath.workdps(max(_DPS, digits + 10)):
        return mpmath.nstr(mpmath.mpf(x), digits, strip_zeros=False)


@dataclass(frozen=True)
class EPoly:
    """Finite sum ``sum_k coeffs[k] * e**k`` with rational coefficients."""

    coeffs: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {int(k): Fraction(v) for k, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def rational(cls, q, power: int = 0) -> "EPoly":
        return cls({power: Fraction(q)})

    def __add__(self, other: "EPoly") -> "EPoly":
        other = _as_epoly(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return EPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "EPoly":
        return EPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "EPoly") -> "EPoly":
        return self + (-_as_epoly(other))

    def __rsub__(self, other) -> "EPoly":
        return _as_epoly(other) - self

    def __mul__(self, q) -> "EPoly":
        q = Fraction(q)
        return EPoly({k: v * q for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def shift(self, power: int) -> "EPoly":
        """Multiply by ``e**power``."""
        return EPoly({k + power: v for k, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        try:
            other = _as_epoly(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs.items()))

    def is_rational(self) -> bool:
        return all(k == 0 for k in self.coeffs)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"not rational: {self}")
        return self.coeffs.get(0, Fraction(0))

    def to_mpf(self) -> mpmath.mpf:
        with mpmath.workdps(_DPS):
            return mpmath.fsum(to_mpf(v) * mpmath.e ** k for k, v in self.coeffs.items())

    def __float__(self) -> float:
        return float(self.to_mpf())

    def __repr__(self) -> str:
        terms = " + ".join(f"({frac_str(v)})*e^{k}" for k, v in self.coeffs.items())
        return f"EPoly({terms or '0'})"


def _as_epoly(x) -> EPoly:
    if isinstance(x, EPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return EPoly.rational(x)
    raise TypeError(f"cannot combine EPoly with {type(x).__name__}")


def power_law_tail(terms: Sequence, n_last: int, decay: float, order: int = 6):
    """Estimate ``sum_{n > n_last} a_n`` for ``a_n ~ n**-decay * P(1/n)``.

    ``terms[i]`` must be ``a_{n_last - len(terms) + 1 + i}`` (the final computed
    terms, in ascending ``n``).  The expansion coefficients of ``P`` are fitted
    exactly through the last ``order`` terms and the tail is summed with Hurwitz
    zeta functions.  Returns ``(estimate, error)`` as floats; the error is the
    change in the estimate when the fit order is reduced by two.  Returns
    ``(inf, inf)`` when the tail diverges (``decay <= 1``) or there are too few
    terms.
    """
    if decay <= 1 or len(terms) < order or order < 3:
        return float("inf"), float("inf")
    with mpmath.workdps(_DPS):
        s = mpmath.mpf(decay)

        def fit(k):
            ns = [n_last - i for i in range(k)]
            vals = [terms[len(terms) - 1 - i] for i in range(k)]
            A = mpmath.matrix(k, k)
            b = mpmath.matrix(k, 1)
            for i, n in enumerate(ns):
                for j in range(k):
                    A[i, j] = mpmath.mpf(n) ** (-s - j)
                v = vals[i]
                b[i] = to_mpf(v) if isinstance(v, (Fraction, int)) else mpmath.mpf(v)
            coef = mpmath.lu_solve(A, b)
            return mpmath.fsum(coef[j] * mpmath.zeta(s + j, n_last + 1) for j in range(k))

        hi = fit(order)
        lo = fit(order - 2)
        return float(hi), float(abs(hi - lo))
