"""Spread-out step distribution and its return probabilities.

The step distribution is uniform on ``Lambda = {x in Z^d : 0 < ||x|| <= L}``.
For the sup norm the n-step return probability is computed exactly from the
decomposition

    D = (M/|Lambda|) B - (1/|Lambda|) delta_o,     M = (2L+1)^d,

where ``B`` is the product-uniform law on the full box ``{-L..L}^d``.  Since
``B^{*k}(o) = (c_k / (2L+1)^k)^d`` with ``c_k`` the number of k-tuples in
``{-L..L}`` summing to zero, this gives

    D^{*n}(o) = |Lambda|^{-n} sum_k binom(n, k) (-1)^(n-k) c_k^d,

an integer numerator over ``|Lambda|^n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .exact import power_law_tail

NORM_ALIASES = {
    "sup": "sup",
    "linf": "sup",
    "inf": "sup",
    "euclidean": "euclidean",
    "l2": "euclidean",
}

#: Largest dimension for which the Euclidean kernel is handled exactly.
EUCLIDEAN_MAX_D = 4


class KernelError(ValueError):
    """Invalid kernel parameters or an unsupported evaluation path."""


def normalize_norm(norm: str) -> str:
    try:
        return NORM_ALIASES[norm.lower()]
    except (KeyError, AttributeError):
        raise KernelError(f"unknown norm {norm!r}; use one of {sorted(NORM_ALIASES)}") from None


@dataclass(frozen=True)
class StepKernel:
    """Uniform step distribution on the punctured ball of radius ``L``."""

    d: int
    L: int
    norm: str
    lambda_size: int
    axis_profile: tuple[int, ...] = ()
    approximate: bool = False

    def in_ball(self, x: Sequence[int]) -> bool:
        if self.norm == "sup":
            return max(abs(c) for c in x) <= self.L
        return sum(c * c for c in x) <= self.L * self.L

    def weight(self, x: Sequence[int]) -> Fraction:
        """Exact value of ``D(x)``."""
        if len(x) != self.d:
            raise KernelError(f"point {tuple(x)} is not in Z^{self.d}")
        if not any(x) or not self.in_ball(x):
            return Fraction(0)
        return Fraction(1, self.lambda_size)

    def offsets(self) -> Iterator[tuple[int, ...]]:
        """Enumerate ``Lambda`` in lexicographic order."""
        rng = range(-self.L, self.L + 1)
        for x in itertools.product(rng, repeat=self.d):
            if any(x) and self.in_ball(x):
                yield x

    def step_distance(self, x: Sequence[int]) -> int:
        """Minimum number of steps from ``o`` to ``x``, or a lower bound for it."""
        if self.norm == "sup":
            r = max((abs(c) for c in x), default=0)
            return -(-r // self.L)
        r2 = sum(c * c for c in x)
        return math.ceil(math.sqrt(r2) / self.L - 1e-12)


def build_kernel(d: int, L: int, norm: str = "sup", approximate: bool = False) -> StepKernel:
    if not isinstance(d, int) or d < 1:
        raise KernelError(f"dimension d must be an integer >= 1, got {d!r}")
    if not isinstance(L, int) or L < 1:
        raise KernelError(f"range L must be an integer >= 1, got {L!r}")
    norm = normalize_norm(norm)
    if norm == "sup":
        return StepKernel(d, L, norm, (2 * L + 1) ** d - 1, (1,) * (2 * L + 1))
    if d > EUCLIDEAN_MAX_D and not approximate:
        raise KernelError(
            f"euclidean kernel needs dense convolution; d={d} > {EUCLIDEAN_MAX_D} "
            "requires approximate=True"
        )
    # Lattice points with 0 < |x|_2 <= L, counted one axis at a time.
    counts = {0: 1}
    for _ in range(d):
        nxt: dict[int, int] = {}
        for r2, c in counts.items():
            for a in range(-L, L + 1):
                s = r2 + a * a
                if s <= L * L:
                    nxt[s] = nxt.get(s, 0) + c
        counts = nxt
    return StepKernel(d, L, norm, sum(counts.values()) - 1, (), approximate)


# ---------------------------------------------------------------------------
# exact return probabilities


def axis_zero_sums(L: int, k_max: int) -> list[int]:
    """``c_k`` = number of k-tuples from ``{-L..L}`` with zero sum, ``k = 0..k_max``."""
    width = 2 * L + 1
    poly = [1]
    out = [1]
    for _ in range(k_max):
        # multiply by (1 + x + ... + x^{2L}) via a running window sum
        prefix = [0, *itertools.accumulate(poly)]
        n = len(poly) + width - 1
        poly = [prefix[min(i + 1, len(poly))] - prefix[max(i + 1 - width, 0)] for i in range(n)]
        out.append(poly[len(poly) // 2])
    return out


def _binomial_numerator(n: int, c: Sequence[int], d: int) -> int:
    return sum(math.comb(n, k) * (-1) ** (n - k) * c[k] ** d for k in range(n + 1))


def _dense_return_counts(kernel: StepKernel, n_max: int) -> list[int]:
    """Number of closed n-step walks, ``n = 0..n_max``, by direct convolution."""
    d, L = kernel.d, kernel.L
    R = ((n_max + 1) // 2) * L
    size = 2 * R + 1
    grid = np.zeros((size,) * d, dtype=object)
    grid.fill(0)
    center = (R,) * d
    grid[center] = 1
    offsets = list(kernel.offsets())
    out = [1]
    for _ in range(n_max):
        new = np.zeros_like(grid)
        new.fill(0)
        for e in offsets:
            dst = tuple(slice(max(s, 0), size + min(s, 0)) for s in e)
            src = tuple(slice(max(-s, 0), size + min(-s, 0)) for s in e)
            new[dst] += grid[src]
        grid = new
        out.append(int(grid[center]))
    return out


def dstar_origin(kernel: StepKernel, n: int) -> Fraction:
    """Exact ``D^{*n}(o)``."""
    if n < 0:
        raise KernelError(f"n must be >= 0, got {n}")
    if kernel.norm == "sup":
        c = axis_zero_sums(kernel.L, n)
        return Fraction(_binomial_numerator(n, c, kernel.d), kernel.lambda_size**n)
    _check_dense(kernel)
    return Fraction(_dense_return_counts(kernel, n)[n], kernel.lambda_size**n)


def _check_dense(kernel: StepKernel) -> None:
    if kernel.d > EUCLIDEAN_MAX_D and not kernel.approximate:
        raise KernelError(f"dense convolution path is limited to d <= {EUCLIDEAN_MAX_D}")


@dataclass(frozen=True)
class ConvolutionTable:
    """``D^{*n}(o)`` for ``n = 0..n_max`` and an estimate of the omitted tail.

    ``tail_bound`` estimates ``sum_{n > n_max} D^{*n}(o)`` (fit estimate plus
    its fit-order error).  It is a heuristic error bar, finite only when
    ``tail_valid``: ``d >= 3`` and the final terms are decreasing.
    """

    kernel: StepKernel
    n_max: int
    values: tuple[Fraction, ...]
    tail_bound: float
    tail_valid: bool
    tail_ratio: float

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def weighted_tail(self, weight: Callable[[int], Fraction], growth: int = 0) -> float:
        """Heuristic bound on ``sum_{n > n_max} weight(n) D^{*n}(o)``.

        ``growth`` is the polynomial degree of ``weight``; the weighted terms
        decay like ``n**(growth - d/2)``.  Infinite when the tail is invalid or
        the weighted series diverges.
        """
        if not self.tail_valid:
            return math.inf
        k = min(8, self.n_max - 1)
        first = self.n_max - k + 1
        terms = [weight(n) * self.values[n] for n in range(first, self.n_max + 1)]
        est, err = power_law_tail(terms, self.n_max, self.kernel.d / 2 - growth)
        if not math.isfinite(est) or est < 0:
            return math.inf
        return est + err


def conv_table(kernel: StepKernel, n_max: int) -> ConvolutionTable:
    if n_max < 2:
        raise KernelError(f"n_max must be >= 2, got {n_max}")
    lam = kernel.lambda_size
    if kernel.norm == "sup":
        c = axis_zero_sums(kernel.L, n_max)
        values = tuple(
            Fraction(_binomial_numerator(n, c, kernel.d), lam**n) for n in range(n_max + 1)
        )
    else:
        _check_dense(kernel)
        counts = _dense_return_counts(kernel, n_max)
        values = tuple(Fraction(w, lam**n) for n, w in enumerate(counts))

    tail_ratio = math.nan
    last = [v for v in values[max(2, n_max - 3) :]]
    if len(last) >= 2 and all(v > 0 for v in last):
        tail_ratio = max(float(b / a) for a, b in zip(last, last[1:]))
    table = ConvolutionTable(kernel, n_max, values, math.inf, False, tail_ratio)
    if kernel.d >= 3 and tail_ratio < 1:
        object.__setattr__(table, "tail_valid", True)
        bound = table.weighted_tail(lambda n: Fraction(1))
        object.__setattr__(table, "tail_bound", bound)
        object.__setattr__(table, "tail_valid", math.isfinite(bound))
    return table


@dataclass(frozen=True)
class TailSum:
    """``S_{>=t}(o)``: exact prefix ``value`` plus a truncation ``error``."""

    t: int
    value: Fraction
    error: float

    def __float__(self) -> float:
        return float(self.value)


def s_geq(table: ConvolutionTable, t: int) -> TailSum:
    if table.kernel.d <= 2:
        raise KernelError(f"S_(>=t)(o) diverges for d={table.kernel.d} <= 2")
    if t < 0:
        raise KernelError(f"t must be >= 0, got {t}")
    if not table.tail_valid:
        raise KernelError("convolution table has no valid tail bound; increase n_max")
    value = sum(table.values[t:], Fraction(0))
    return TailSum(t, value, table.tail_bound)


# ---------------------------------------------------------------------------
# Fourier transform and lattice/continuum comparison


def dhat(kernel: StepKernel, k: Sequence[float]) -> float:
    """Characteristic function ``sum_x D(x) cos(k.x)``."""
    k = [float(v) for v in k]
    if len(k) != kernel.d:
        raise KernelError(f"wave vector has length {len(k)}, expected {kernel.d}")
    if kernel.norm == "sup":
        prod = 1.0
        for kj in k:
            prod *= 1.0 + 2.0 * sum(math.cos(kj * m) for m in range(1, kernel.L + 1))
        return (prod - 1.0) / kernel.lambda_size
    total = math.fsum(math.cos(sum(a * b for a, b in zip(k, x))) for x in kernel.offsets())
    return total / kernel.lambda_size


def scaling_gap_exact(d: int, L: int, n: int) -> Fraction:
    from .continuum import ustar_origin

    if n < 2:
        raise KernelError(f"n must be >= 2, got {n}")
    kernel = build_kernel(d, L, "sup")
    return abs(L**d * dstar_origin(kernel, n) - ustar_origin(n, d))


def scaling_gap(d: int, L: int, n: int) -> float:
    """``|L^d D^{*n}(o) - U^{*n}(o)|`` for the sup-norm kernel."""
    return float(scaling_gap_exact(d, L, n))
