"""Fixed point ``p_1 g_{p_1} = 1``, leading-order lattice predictions, the
``G - H`` decomposition of the one-point function, and series estimators.

Leading-order quantities are returned as ``Estimate`` objects whose exact
part is an ``EPoly`` (rational coefficients times powers of ``e``), so the
algebraic identities between them hold exactly rather than to round-off.

``G`` is evaluated as a product.  With ``q = p_1/|Lambda|`` and
``r(y) = g_{p_1} - tau_{p_1}(y)`` (trees containing ``y`` but not ``o``,
by translation invariance of ``g``),

    G = 1 + sum_{Y nonempty} prod_{y in Y} q r(y) = prod_{y in Lambda} (1 + q r(y)),

the usual expansion of a product over subsets.  At the fixed point
``q r(y) = (1 - tau(y)/g)/|Lambda|``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .census import PowerSeries
from .continuum import normalize_model
from .exact import EPoly
from .kernels import ConvolutionTable, KernelError, s_geq


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class P1Solution:
    p1: float
    residual: float
    truncation_order: int
    bracket: tuple[float, float]
    iterations: int = 0


def solve_p1(series: PowerSeries, tol: float = 1e-12, max_bracket: float = 2.0**20) -> P1Solution:
    """Root of ``p g(p) = 1`` for a truncated one-point series.

    ``p g(p)`` is strictly increasing on ``p > 0`` (non-negative coefficients,
    constant term 1), so a bracket ``[0, hi]`` is grown by doubling and then
    refined with Newton steps that fall back to bisection.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if series.meaning != "one_point":
        raise ValueError(f"expected a one-point series, got {series.meaning!r}")
    f = lambda p: p * series(p) - 1.0
    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        lo, hi = hi, 2 * hi
        if hi > max_bracket:
            raise SolverError(f"no sign change of p*g(p) - 1 up to p = {max_bracket}")
    bracket = (lo, hi)
    p = hi if f(hi) == 0 else 0.5 * (lo + hi)
    for it in range(1, 500):
        fp = f(p)
        if abs(fp) <= tol * 0.5 or hi - lo <= 4 * math.ulp(hi):
            break
        if fp < 0:
            lo = p
        else:
            hi = p
        slope = series(p) + p * series.derivative(p)
        step = p - fp / slope if slope > 0 else math.nan
        p = step if lo < step < hi else 0.5 * (lo + hi)
    else:
        raise SolverError("p1 iteration did not converge")
    residual = abs(f(p))
    if residual > tol:
        raise SolverError(f"residual {residual:.3e} above tolerance {tol:.1e}")
    return P1Solution(p, residual, series.truncation_order, bracket, it)


# ---------------------------------------------------------------------------
# leading-order lattice quantities


@dataclass(frozen=True)
class Estimate:
    """Exact value of the truncated expression plus a heuristic tail error."""

    exact: EPoly
    error: float

    def __float__(self) -> float:
        return float(self.exact)

    @property
    def value(self) -> float:
        return float(self.exact)


def _weighted_sum(table: ConvolutionTable, start: int, weight) -> Fraction:
    return sum((weight(n) * table.values[n] for n in range(start, table.n_max + 1)), Fraction(0))


def _require_d(table: ConvolutionTable, d_min: int, what: str) -> None:
    d = table.kernel.d
    if d < d_min:
        raise KernelError(f"{what} needs d >= {d_min}, got d={d}")


def predict_p1_lattice(model: str, table: ConvolutionTable) -> Estimate:
    """``1/e + sum_{n>=2} (n+1)/(2e) D^{*n}(o)``, minus ``S_{>=3}(o)/(2e^2)`` for animals."""
    model = normalize_model(model)
    _require_d(table, 5, "p1 prediction")
    if table.kernel.d <= 8:
        warnings.warn(f"d={table.kernel.d}: leading-order p1 formula is established for d > 8", RuntimeWarning, stacklevel=2)
    series = _weighted_sum(table, 2, lambda n: Fraction(n + 1, 2))
    err = table.weighted_tail(lambda n: Fraction(n + 1, 2), growth=1) / math.e
    value = EPoly.rational(1, -1) + EPoly.rational(series, -1)
    if model == "animals":
        s3 = s_geq(table, 3)
        value = value - EPoly.rational(s3.value / 2, -2)
        err += s3.error / (2 * math.e**2)
    return Estimate(value, err)


def g0_closed(lambda_size: int) -> Fraction:
    """``(1 + 1/|Lambda|)^{|Lambda|}``."""
    if lambda_size < 1:
        raise ValueError(f"lambda_size must be >= 1, got {lambda_size}")
    return (1 + Fraction(1, lambda_size)) ** lambda_size


def g_leading(table: ConvolutionTable) -> Estimate:
    """``e (1 - D^{*2}(o)/2 - S_{>=2}(o))``."""
    _require_d(table, 3, "g_leading")
    s2 = s_geq(table, 2)
    inner = 1 - table.values[2] / 2 - s2.value
    return Estimate(EPoly.rational(inner, 1), math.e * s2.error)


def h_leading(table: ConvolutionTable) -> Estimate:
    """``e sum_{n>=3} (n-1)/2 D^{*n}(o)``."""
    # the weighted series converges only for d/2 - 1 > 1
    _require_d(table, 5, "h_leading")
    total = _weighted_sum(table, 3, lambda n: Fraction(n - 1, 2))
    err = table.weighted_tail(lambda n: Fraction(n - 1, 2), growth=1)
    return Estimate(EPoly.rational(total, 1), math.e * err)


def i_leading(table: ConvolutionTable) -> Estimate:
    """``S_{>=3}(o) / 2``."""
    _require_d(table, 3, "i_leading")
    s3 = s_geq(table, 3)
    return Estimate(EPoly.rational(s3.value / 2), s3.error / 2)


def lattice_rw_sum(table: ConvolutionTable) -> Fraction:
    """``1 - sum_{n=2}^{N} (n+1)/2 D^{*n}(o)`` on the table's truncation."""
    return 1 - _weighted_sum(table, 2, lambda n: Fraction(n + 1, 2))


# ---------------------------------------------------------------------------
# G - H decomposition


@dataclass(frozen=True)
class DecompositionReport:
    model: str
    p1: float
    G: float
    H_effective: float
    g: float
    lambda_size: int
    leading_predictions: Mapping[str, float | None] = field(default_factory=dict)


def gh_decompose(
    model: str,
    g: PowerSeries,
    tau: Mapping[tuple[int, ...], PowerSeries],
    p1: float,
    offsets: Sequence[tuple[int, ...]],
    table: ConvolutionTable | None = None,
) -> DecompositionReport:
    """Split ``g_{p_1}`` into the independent-subtree part ``G`` and the rest.

    ``offsets`` is the neighbourhood ``Lambda``; ``tau`` maps points to
    two-point series, with missing points treated as zero.  For trees
    ``H_effective = G - g``; for animals the same difference is ``H - I``.
    """
    model = normalize_model(model)
    offsets = sorted(tuple(y) for y in offsets)
    lam = len(offsets)
    for y, s in tau.items():
        if s.max_vertices != g.max_vertices:
            raise ValueError(
                f"tau{y} truncated at max_vertices={s.max_vertices}, g at {g.max_vertices}"
            )
    # exact rational evaluation at the binary value of p1: G - g has
    # non-negative coefficients, so its sign must not depend on round-off
    pq = Fraction(p1)
    gp = g.exact(pq)
    q = pq / lam
    G = Fraction(1)
    for y in offsets:
        ty = tau[y].exact(pq) if y in tau else Fraction(0)
        G *= 1 + q * (gp - ty)
    leading: dict[str, float | None] = {
        "g0_closed": float(g0_closed(lam)),
        "g_leading": None,
        "h_leading": None,
        "i_leading": None,
    }
    if table is not None:
        d = table.kernel.d
        if d >= 3:
            leading["g_leading"] = g_leading(table).value
            leading["i_leading"] = i_leading(table).value
        if d >= 5:
            leading["h_leading"] = h_leading(table).value
    return DecompositionReport(model, p1, float(G), float(G - gp), float(gp), lam, leading)


# ---------------------------------------------------------------------------
# series estimators and diagnostics


@dataclass(frozen=True)
class RatioEstimate:
    """``a_k / a_{k+1}`` and its linear-in-``1/k`` extrapolation.

    ``index[i]`` is the ``k`` of ``ratios[i]``; indices with a zero
    coefficient on either side are listed in ``skipped``.
    """

    index: tuple[int, ...]
    ratios: tuple[float, ...]
    extrapolated: tuple[float, ...]
    skipped: tuple[int, ...]


def pc_ratio_estimate(chi: PowerSeries) -> RatioEstimate:
    a = chi.coefficients
    index, ratios, skipped = [], [], []
    for k in range(len(a) - 1):
        if a[k] == 0 or a[k + 1] == 0:
            skipped.append(k)
            continue
        index.append(k)
        ratios.append(float(a[k] / a[k + 1]))
    # r_k ~ R (1 + c/(k+1)); eliminate c between consecutive indices
    extrap = []
    for i in range(1, len(index)):
        k0, k1 = index[i - 1] + 1, index[i] + 1
        extrap.append((k1 * ratios[i] - k0 * ratios[i - 1]) / (k1 - k0))
    return RatioEstimate(tuple(index), tuple(ratios), tuple(extrap), tuple(skipped))


def triangle_lb(lambda_size: int, p):
    """``|Lambda| (|Lambda| - 1) (p/|Lambda|)^3``; exact for rational ``p``."""
    if isinstance(p, (int, Fraction)):
        return lambda_size * (lambda_size - 1) * (Fraction(p) / lambda_size) ** 3
    return lambda_size * (lambda_size - 1) * (p / lambda_size) ** 3


def hath_ub(tau: Mapping[tuple[int, ...], PowerSeries], p: float, window: float | None = None, norm: str = "sup") -> float:
    """``sum_{x != o} tau_p(x)^2`` over the points of ``tau`` (optionally within ``window``)."""
    terms = []
    for x, s in sorted(tau.items()):
        if not any(x):
            continue
        if window is not None:
            r = max(abs(c) for c in x) if norm == "sup" else math.sqrt(sum(c * c for c in x))
            if r > window:
                continue
        terms.append(s(p) ** 2)
    return math.fsum(terms)


@dataclass(frozen=True)
class DiagnosticsReport:
    p: float
    triangle_lb: float
    hath_ub: float
    window_radius: float


def diagnostics(lambda_size: int, tau, p: float, window_radius: float) -> DiagnosticsReport:
    return DiagnosticsReport(p, float(triangle_lb(lambda_size, p)), hath_ub(tau, p, window_radius), window_radius)
