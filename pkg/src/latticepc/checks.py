"""Cross-module consistency checks run by ``latticepc check``.

Each check returns ``(passed, detail)``.  The oracles used here (dense array
convolution, midpoint-grid convolution, closed forms for the 1-D model) are
independent of the code paths they verify.
"""

from __future__ import annotations

import math
import random
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from . import census as cs
from . import continuum as ct
from . import critical as cr
from . import kernels as kn


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def grid_center_density(n: int, m: int) -> float:
    """Density at 0 of a sum of ``n`` uniforms on ``[-1, 1]`` on a midpoint grid of ``2m`` cells."""
    w = np.full(2 * m, 1.0 / (2 * m))
    c = np.array([1.0])
    for _ in range(n):
        c = np.convolve(c, w)
    h = 1.0 / m
    mid = len(c) // 2
    if len(c) % 2:
        return c[mid] / h
    return 0.5 * (c[mid - 1] + c[mid]) / h


def grid_ustar_1d(n: int, levels=(32, 64, 128, 256)) -> float:
    """Richardson-extrapolated (in ``h^2``) grid value of ``u^{*n}(0)``."""
    col = [grid_center_density(n, m) for m in levels]
    j = 1
    while len(col) > 1:
        f = 4.0**j
        col = [(f * b - a) / (f - 1) for a, b in zip(col, col[1:])]
        j += 1
    return col[0]


def _d2_identity():
    bad = []
    for d in (1, 2, 3, 9):
        for L in (1, 2, 4):
            k = kn.build_kernel(d, L)
            if kn.dstar_origin(k, 2) != Fraction(1, k.lambda_size):
                bad.append((d, L))
    return not bad, f"failures: {bad}" if bad else "12 (d, L) pairs exact"


def _dense_oracle():
    bad = []
    for d in (1, 2, 3):
        for L in (1, 2):
            k = kn.build_kernel(d, L)
            dense = kn._dense_return_counts(k, 6)
            tab = kn.conv_table(k, 6)
            for n in range(7):
                if tab.values[n] != Fraction(dense[n], k.lambda_size**n):
                    bad.append((d, L, n))
    return not bad, f"failures: {bad}" if bad else "d<=3, L<=2, n<=6 exact"


def _telescoping():
    tab = kn.conv_table(kn.build_kernel(5, 1), 40)
    ok = all(kn.s_geq(tab, t).value - kn.s_geq(tab, t + 1).value == tab.values[t] for t in range(0, 41))
    return ok, "S(t) - S(t+1) = D^{*t}(o) for t <= 40"


def _irwin_hall_oracle():
    worst = max(abs(float(ct.irwin_hall_center(n)) / 2 - grid_ustar_1d(n)) for n in range(1, 51))
    return worst <= 1e-10, f"max |IH - grid| = {worst:.2e} (n <= 50)"


def _constants():
    a, b = ct.c_lt(9, 100).value, ct.c_lt(9, 200).value
    la = ct.c_la(9, 200).value
    ok = abs(a - b) <= 1e-12 and la < b
    return ok, f"|C_LT(100) - C_LT(200)| = {abs(a - b):.2e}, C_LA = {la:.12g} < C_LT = {b:.12g}"


def _scaling():
    ratios = []
    ok = True
    for n in (2, 3, 4):
        gaps = [kn.scaling_gap_exact(9, L, n) for L in (4, 8, 16)]
        ok &= gaps[0] > gaps[1] > gaps[2]
        for g1, g2 in zip(gaps, gaps[1:]):
            r = float(g2 / g1)
            ratios.append(round(r, 3))
            ok &= 0.3 <= r <= 0.7
    return ok, f"gap(2L)/gap(L) = {ratios}"


def _one_dim():
    c = cs.enumerate_polymers("trees", 1, 1, max_vertices=30)
    by_n = c.by_vertices()
    ok = all(by_n[n] == n for n in range(1, 31))
    tn = cs.tn_table(c)
    ok &= all(t == 1 for t in tn.t)
    chi = cs.chi_from_census(c)
    ok &= all(chi.coefficients[k] == Fraction((k + 1) ** 2, 2**k) for k in range(30))
    p1 = cr.solve_p1(cs.one_point_series(c)).p1
    ok &= abs(p1 - (4 - 2 * math.sqrt(3))) <= 1e-6
    est = cr.pc_ratio_estimate(chi).extrapolated[-1]
    ok &= abs(est - 2) <= 0.1
    return ok, f"p1 = {p1:.12f}, ratio tail = {est:.6f}"


def _leading_algebra():
    bad = []
    for d, L in ((9, 1), (9, 2), (5, 1)):
        tab = kn.conv_table(kn.build_kernel(d, L), 40)
        lhs = (cr.g_leading(tab).exact - cr.h_leading(tab).exact).shift(-1)
        if lhs != cr.lattice_rw_sum(tab):
            bad.append((d, L))
    return not bad, f"failures: {bad}" if bad else "exact at N = 40"


def _animal_correction():
    tab = kn.conv_table(kn.build_kernel(9, 1), 40)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        diff = cr.predict_p1_lattice("animals", tab).exact - cr.predict_p1_lattice("trees", tab).exact
    ok = diff == -cr.EPoly.rational(kn.s_geq(tab, 3).value / 2, -2)
    la = ct.c_la(9, 200)
    lt = ct.c_lt(9, 200)
    gap = abs((lt.value - la.value) - la.correction.value)
    ok &= gap <= la.error + 1e-15
    return ok, f"lattice identity exact; continuum mismatch {gap:.1e} (error {la.error:.1e})"


def _g0():
    vals = []
    ok = True
    for lam, tol in ((10**3, 1e-3), (10**4, 1e-4), (10**5, 1e-5)):
        g0 = cr.g0_closed(lam)
        v = lam * (1 - float(mpmath.mpf(g0.numerator) / g0.denominator / mpmath.e))
        vals.append(v)
        ok &= abs(v - 0.5) <= tol
    return ok, "|Lambda|(1 - G0/e) = " + ", ".join(f"{v:.7f}" for v in vals)


def _closure():
    out = []
    ok = True
    for d, N in ((1, 30), (2, 6)):
        g, tau = cs.two_point_table("trees", d, 1, max_vertices=N)
        sol = cr.solve_p1(g)
        rep = cr.gh_decompose("trees", g, tau, sol.p1, list(kn.build_kernel(d, 1).offsets()))
        rel = abs((rep.G - rep.H_effective) - rep.g) / rep.g
        ok &= rel <= 1e-12 and rep.H_effective >= 0
        out.append(f"d={d}: H={rep.H_effective:.3g}, rel={rel:.1e}")
    return ok, "; ".join(out)


def _properties():
    ok = True
    for d, L, N in ((1, 1, 12), (2, 1, 5), (3, 1, 4)):
        tc = cs.enumerate_polymers("trees", d, L, max_vertices=N)
        ac = cs.enumerate_polymers("animals", d, L, max_vertices=N)
        tn = cs.tn_table(tc)
        ok &= all(tn[a + b] >= tn[a] * tn[b] for a in range(1, N) for b in range(1, N - a + 1))
        for c in (tc, ac):
            s = cs.one_point_series(c)
            ok &= s.coefficient(0) == 1 and s.coefficient(1) == 1
        tv, av = tc.by_vertices(), ac.by_vertices()
        ok &= all(av[n] >= tv[n] for n in tv)
    rng = random.Random(12345)
    worst = 0.0
    for d, L in ((1, 3), (2, 2), (3, 1)):
        k = kn.build_kernel(d, L)
        pts = list(k.offsets())
        for _ in range(100):
            vec = [rng.uniform(-math.pi, math.pi) for _ in range(d)]
            direct = math.fsum(math.cos(sum(a * b for a, b in zip(vec, x))) for x in pts) / len(pts)
            worst = max(worst, abs(kn.dhat(k, vec) - direct))
    ok &= worst <= 1e-12
    return ok, f"supermultiplicativity, pins, model ordering; dhat worst {worst:.1e}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("D*2(o) = 1/|Lambda|", _d2_identity),
    ("factorized = dense convolution", _dense_oracle),
    ("S_geq telescoping", _telescoping),
    ("Irwin-Hall = grid convolution", _irwin_hall_oracle),
    ("C_LT truncation / C_LA < C_LT", _constants),
    ("lattice -> continuum scaling", _scaling),
    ("1-D closed forms", _one_dim),
    ("leading-order algebra identity", _leading_algebra),
    ("animal correction", _animal_correction),
    ("G0 asymptotics", _g0),
    ("G - H closure", _closure),
    ("property suites", _properties),
]


def run_checks(names: list[str] | None = None) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        if names and name not in names:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
