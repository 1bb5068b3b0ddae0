"""Exact enumeration of spread-out lattice trees and lattice animals.

Polymers are connected edge sets on the graph with edges ``{x, y}``,
``0 < ||x - y|| <= L``, always containing a root vertex (the smallest required
vertex).  The enumeration is Redelmeier's algorithm applied to edges: every
recursion node is a distinct polymer, an edge becomes a candidate the first
time it touches the current vertex set, and once a candidate has been tried
at some level it is never re-added below that level.  So each connected edge
set containing the root is produced exactly once, with no canonical-form
lookups.  Trees skip edges that would close a cycle.

The isolated root (no edges) is counted as the single-vertex polymer.
"""

from __future__ import annotations

import io
import math
import os
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, TextIO

from .continuum import normalize_model
from .kernels import StepKernel, build_kernel

DEFAULT_BUDGET = 20_000_000
FORMAT_VERSION = 1

Point = tuple[int, ...]


class CensusBudgetError(RuntimeError):
    """Raised when an enumeration would visit more polymers than allowed."""

    def __init__(self, message: str, parameter: str = "max_vertices"):
        super().__init__(message)
        self.parameter = parameter


class CensusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class PolymerCensus:
    model: str
    d: int
    L: int
    norm: str
    required: tuple[Point, ...]
    max_vertices: int
    counts: Mapping[tuple[int, int], int]
    lambda_size: int = 0

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(sorted(self.counts.items())))
        if not self.lambda_size:
            object.__setattr__(self, "lambda_size", build_kernel(self.d, self.L, self.norm).lambda_size)

    def by_vertices(self) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for (n, _), c in self.counts.items():
            out[n] += c
        return dict(sorted(out.items()))

    @property
    def rooted_at_origin(self) -> bool:
        return self.required == ((0,) * self.d,)


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series ``sum_k coefficients[k] p^k`` with exact coefficients."""

    coefficients: tuple[Fraction, ...]
    truncation_order: int
    meaning: str = "one_point"
    max_vertices: int | None = None

    def __call__(self, p: float) -> float:
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * p + float(c)
        return acc

    def exact(self, p: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * p + c
        return acc

    def derivative(self, p: float) -> float:
        acc = 0.0
        for k in range(len(self.coefficients) - 1, 0, -1):
            acc = acc * p + k * float(self.coefficients[k])
        return acc

    def coefficient(self, k: int) -> Fraction:
        return self.coefficients[k] if k < len(self.coefficients) else Fraction(0)

    def __len__(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True)
class TnTable:
    t: tuple[Fraction, ...]  # t[0] is t_1

    def __getitem__(self, n: int) -> Fraction:
        if n < 1:
            raise IndexError(n)
        return self.t[n - 1]

    @property
    def n_max(self) -> int:
        return len(self.t)


# ---------------------------------------------------------------------------
# enumeration core


def _radius(L: int, max_vertices: int, required=(), root=None) -> int:
    # candidate edges reach max_vertices * L from the root
    far = max((abs(a - b) for x in required for a, b in zip(x, root)), default=0)
    return max(max_vertices * L, far) + 1


def _run(
    model: str,
    kernel: StepKernel,
    required: Sequence[Point],
    max_vertices: int,
    budget: int,
    visit: Callable[[list, int], None],
) -> None:
    """Call ``visit(vertex_codes, n_edges)`` once per polymer containing ``required``."""
    trees = model == "trees"
    d = kernel.d
    root = min(required)
    R = _radius(kernel.L, max_vertices, required, root)
    base = 2 * R + 1

    def encode(x: Sequence[int]) -> int:
        code = 0
        for i in reversed(range(d)):
            code = code * base + (x[i] - root[i] + R)
        return code

    def decode(code: int) -> Point:
        out = []
        for i in range(d):
            code, r = divmod(code, base)
            out.append(r - R + root[i])
        return tuple(out)

    deltas = [encode([root[i] + e[i] for i in range(d)]) - encode(root) for e in kernel.offsets()]
    req_codes = [encode(x) for x in required]
    req_pts = {c: decode(c) for c in req_codes}
    root_code = encode(root)
    check_reach = len(set(req_codes)) > 1

    vertices: set[int] = {root_code}
    vlist: list[int] = [root_code]
    seen: set[tuple[int, int]] = set()
    n_edges = 0
    nodes = 0

    def reachable() -> bool:
        spare = max_vertices - len(vlist)
        for c in req_codes:
            if c in vertices:
                continue
            x = req_pts[c]
            best = min(kernel.step_distance([a - b for a, b in zip(x, decode(v))]) for v in vlist)
            if best > spare:
                return False
        return True

    def candidates(w: int, internal: bool = False) -> list[tuple[int, int]]:
        out = []
        for dl in deltas:
            u = w + dl
            if internal and u not in vertices:
                continue
            e = (w, u) if w < u else (u, w)
            if e not in seen:
                seen.add(e)
                out.append(e)
        return out

    def rec(untried: list[tuple[int, int]]) -> None:
        nonlocal nodes, n_edges
        nodes += 1
        if nodes > budget:
            raise CensusBudgetError(
                f"enumeration exceeded budget of {budget} polymers "
                f"(model={model}, d={d}, L={kernel.L}, max_vertices={max_vertices})"
            )
        if all(c in vertices for c in req_codes):
            visit(vlist, n_edges)
        full = len(vlist) == max_vertices
        if full:
            # only edges between existing vertices can still be added
            if trees:
                return
            untried = [e for e in untried if e[0] in vertices and e[1] in vertices]
        else:
            untried = list(untried)
        while untried:
            a, b = untried.pop()
            a_in, b_in = a in vertices, b in vertices
            if a_in and b_in:
                if trees:
                    continue
                n_edges += 1
                rec(untried)
                n_edges -= 1
                continue
            if full:
                continue
            w = b if a_in else a
            vertices.add(w)
            vlist.append(w)
            n_edges += 1
            if not check_reach or reachable():
                new = candidates(w, internal=len(vlist) == max_vertices)
                rec(untried + new)
                seen.difference_update(new)
            n_edges -= 1
            vlist.pop()
            vertices.discard(w)

    rec(candidates(root_code))


def _prepare(model, d, L, norm, required, max_vertices):
    model = normalize_model(model)
    kernel = build_kernel(d, L, norm)
    if max_vertices < 1:
        raise ValueError(f"max_vertices must be >= 1, got {max_vertices}")
    required = tuple(sorted({tuple(int(c) for c in x) for x in required}))
    if not required:
        raise ValueError("required vertex set must be nonempty")
    for x in required:
        if len(x) != d:
            raise ValueError(f"required point {x} is not in Z^{d}")
    return model, kernel, required


def enumerate_polymers(
    model: str,
    d: int,
    L: int,
    norm: str = "sup",
    required: Iterable[Sequence[int]] | None = None,
    max_vertices: int = 4,
    budget: int = DEFAULT_BUDGET,
) -> PolymerCensus:
    """Count polymers containing ``required`` by (vertex count, edge count)."""
    if required is None:
        required = [(0,) * d]
    model, kernel, required = _prepare(model, d, L, norm, required, max_vertices)
    counts: dict[tuple[int, int], int] = defaultdict(int)

    def visit(vlist, n_edges):
        counts[(len(vlist), n_edges)] += 1

    _run(model, kernel, required, max_vertices, budget, visit)
    return PolymerCensus(model, d, L, kernel.norm, required, max_vertices, counts, kernel.lambda_size)


# ---------------------------------------------------------------------------
# generating functions


def _series_from_counts(counts, lambda_size, weight, order, meaning, max_vertices) -> PowerSeries:
    coeffs = [Fraction(0)] * (order + 1)
    for (n, k), c in counts.items():
        if k <= order:
            coeffs[k] += Fraction(weight(n) * c, lambda_size**k)
    return PowerSeries(tuple(coeffs), order, meaning, max_vertices)


def _order(census: PolymerCensus) -> int:
    if census.model == "trees":
        return census.max_vertices - 1
    return max((k for _, k in census.counts), default=0)


def one_point_series(census: PolymerCensus) -> PowerSeries:
    """Truncated ``g_p``; coefficient of ``p^k`` is ``#(k-edge polymers)/|Lambda|^k``."""
    if not census.rooted_at_origin:
        raise ValueError("one-point series needs a census with required = {o}")
    return _series_from_counts(
        census.counts, census.lambda_size, lambda n: 1, _order(census), "one_point", census.max_vertices
    )


def chi_from_census(census: PolymerCensus) -> PowerSeries:
    """``chi_p`` via the ``|V|``-weighted one-point sum."""
    if not census.rooted_at_origin:
        raise ValueError("susceptibility needs a census with required = {o}")
    return _series_from_counts(
        census.counts, census.lambda_size, lambda n: n, _order(census), "susceptibility", census.max_vertices
    )


def chi_series(
    model: str, d: int, L: int, norm: str = "sup", max_vertices: int = 4, budget: int = DEFAULT_BUDGET
) -> PowerSeries:
    return chi_from_census(enumerate_polymers(model, d, L, norm, None, max_vertices, budget))


def two_point_series(
    model: str,
    d: int,
    L: int,
    norm: str = "sup",
    x: Sequence[int] = (1,),
    max_vertices: int = 4,
    budget: int = DEFAULT_BUDGET,
) -> PowerSeries:
    """Truncated ``tau_p(x)``; ``x = o`` returns the one-point series."""
    o = (0,) * d
    x = tuple(int(c) for c in x)
    census = enumerate_polymers(model, d, L, norm, [o, x], max_vertices, budget)
    order = max_vertices - 1 if census.model == "trees" else max((k for _, k in census.counts), default=0)
    if census.model == "animals":
        # keep the order comparable with the one-point series at equal max_vertices
        order = max(order, max_vertices - 1)
    if x == o:
        return one_point_series(census)
    return _series_from_counts(census.counts, census.lambda_size, lambda n: 1, order, "two_point", max_vertices)


def two_point_table(
    model: str,
    d: int,
    L: int,
    norm: str = "sup",
    max_vertices: int = 4,
    budget: int = DEFAULT_BUDGET,
) -> tuple[PowerSeries, dict[Point, PowerSeries]]:
    """One enumeration from ``o`` giving ``g_p`` and ``tau_p(x)`` for every reachable ``x != o``.

    The support of the returned map is every ``x`` that lies in some polymer
    with at most ``max_vertices`` vertices, i.e. the whole window on which the
    truncated ``tau_p`` is nonzero.
    """
    model, kernel, required = _prepare(model, d, L, norm, [(0,) * d], max_vertices)
    acc: dict[int, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    counts: dict[tuple[int, int], int] = defaultdict(int)

    def visit(vlist, n_edges):
        counts[(len(vlist), n_edges)] += 1
        for v in vlist:
            acc[v][n_edges] += 1

    _run(model, kernel, required, max_vertices, budget, visit)
    census = PolymerCensus(model, d, L, kernel.norm, required, max_vertices, counts, kernel.lambda_size)
    g = one_point_series(census)
    order = g.truncation_order
    lam = kernel.lambda_size

    R = _radius(L, max_vertices)
    base = 2 * R + 1

    def decode(code):
        out = []
        for _ in range(d):
            code, r = divmod(code, base)
            out.append(r - R)
        return tuple(out)

    o_code = 0
    for _ in range(d):
        o_code = o_code * base + R
    tau = {}
    for code in sorted(acc, key=decode):
        if code == o_code:
            continue
        coeffs = [Fraction(0)] * (order + 1)
        for k, c in acc[code].items():
            coeffs[k] += Fraction(c, lam**k)
        tau[decode(code)] = PowerSeries(tuple(coeffs), order, "two_point", max_vertices)
    return g, tau


def tn_table(census: PolymerCensus) -> TnTable:
    """``t_n = (number of n-vertex trees containing o) / n``."""
    if census.model != "trees" or not census.rooted_at_origin:
        raise ValueError("t_n needs a tree census with required = {o}")
    by_n = census.by_vertices()
    return TnTable(tuple(Fraction(by_n.get(n, 0), n) for n in range(1, census.max_vertices + 1)))


def growth_pc_estimate(tn: TnTable, lambda_size: int) -> list[float]:
    """Finite-n values ``(n^2 t_n / |Lambda|^{n-1})^{-1/n}``, ``n = 1..``."""
    out = []
    for n in range(1, tn.n_max + 1):
        t = tn[n]
        if t <= 0:
            raise ValueError(f"t_{n} = {t} is not positive")
        log_val = 2 * math.log(n) + math.log(t.numerator) - math.log(t.denominator) - (n - 1) * math.log(lambda_size)
        out.append(math.exp(-log_val / n))
    return out


# ---------------------------------------------------------------------------
# census file format


def _fmt_points(points) -> str:
    return ";".join(",".join(str(c) for c in x) for x in points)


def _parse_points(text: str) -> tuple[Point, ...]:
    return tuple(tuple(int(c) for c in part.split(",")) for part in text.split(";") if part)


def dumps_census(census: PolymerCensus) -> str:
    buf = io.StringIO()
    write_census(census, buf)
    return buf.getvalue()


def write_census(census: PolymerCensus, target: str | os.PathLike | TextIO) -> None:
    """Header of ``key=value`` lines, then ``n_vertices,n_edges,count`` records."""
    lines = [
        "# latticepc polymer census",
        f"format_version={FORMAT_VERSION}",
        f"model={census.model}",
        f"d={census.d}",
        f"L={census.L}",
        f"norm={census.norm}",
        f"required={_fmt_points(census.required)}",
        f"max_vertices={census.max_vertices}",
        f"lambda_size={census.lambda_size}",
        "n_vertices,n_edges,count",
    ]
    lines += [f"{n},{k},{c}" for (n, k), c in census.counts.items()]
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def loads_census(text: str) -> PolymerCensus:
    header: dict[str, str] = {}
    counts: dict[tuple[int, int], int] = {}
    in_records = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not in_records:
            if line == "n_vertices,n_edges,count":
                in_records = True
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise CensusFormatError(f"line {lineno}: expected key=value, got {line!r}")
            header[key.strip()] = value.strip()
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise CensusFormatError(f"line {lineno}: expected 3 fields, got {line!r}")
        n, k, c = (int(p) for p in parts)
        if (n, k) in counts:
            raise CensusFormatError(f"line {lineno}: duplicate record ({n}, {k})")
        counts[(n, k)] = c
    missing = {"format_version", "model", "d", "L", "norm", "required", "max_vertices"} - header.keys()
    if missing or not in_records:
        raise CensusFormatError(f"incomplete census header, missing {sorted(missing) or ['records']}")
    if int(header["format_version"]) != FORMAT_VERSION:
        raise CensusFormatError(f"unsupported format_version {header['format_version']}")
    census = PolymerCensus(
        normalize_model(header["model"]),
        int(header["d"]),
        int(header["L"]),
        header["norm"],
        _parse_points(header["required"]),
        int(header["max_vertices"]),
        counts,
        int(header.get("lambda_size", 0)),
    )
    return census


def read_census(source: str | os.PathLike | TextIO) -> PolymerCensus:
    if hasattr(source, "read"):
        return loads_census(source.read())
    with open(source, encoding="utf-8") as fh:
        return loads_census(fh.read())
