"""Command-line front end.

    latticepc kernel     --d 9 --L 1 --nmax 40
    latticepc constants  --d 9 --nmax 200 --l-range 1..8
    latticepc enumerate  --model lt --d 1 --L 1 --max-vertices 6 --out census.txt
    latticepc critical   --from census.txt
    latticepc check

Exit codes: 0 success, 1 invariant-check failure, 2 usage/validation/I-O
error, 3 enumeration budget exceeded.

CSV output is the main table of each report with a fixed column order:

    kernel     n, exact, decimal
    constants  n, exact, decimal            (U^{*n}(o))
    critical   k, coefficient, ratio, extrapolated
    check      name, passed, seconds, detail
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from fractions import Fraction

from . import census as cs
from . import continuum as ct
from . import critical as cr
from . import kernels as kn
from .exact import decimal_str, frac_str

SCHEMA_VERSION = 1

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _l_range(text: str) -> list[int]:
    a, sep, b = text.partition("..")
    try:
        lo, hi = (int(a), int(b)) if sep else (int(a), int(a))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 1 <= A <= B, got {text!r}")
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--precision", type=int, default=15, help="significant digits of decimal renderings")

    lattice = argparse.ArgumentParser(add_help=False)
    lattice.add_argument("--d", type=int, required=True)
    lattice.add_argument("--L", type=int, default=1)
    lattice.add_argument("--norm", choices=("linf", "l2", "sup", "euclidean"), default="linf")

    p = _Parser(prog="latticepc", description="Critical-point expansion of spread-out lattice trees and animals.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    k = sub.add_parser("kernel", parents=[common, lattice], help="return probabilities D^{*n}(o) and tail sums")
    k.add_argument("--nmax", type=int, default=40)

    c = sub.add_parser("constants", parents=[common], help="continuum constants C_LT, C_LA and predicted p_c")
    c.add_argument("--d", type=int, required=True)
    c.add_argument("--nmax", type=int, default=200)
    c.add_argument("--l-range", type=_l_range, default=_l_range("1..4"), dest="l_range")

    e = sub.add_parser("enumerate", parents=[common, lattice], help="exact polymer census")
    e.add_argument("--model", choices=("lt", "la"), default="lt")
    e.add_argument("--max-vertices", type=int, required=True, dest="max_vertices")
    e.add_argument("--required", default=None, help="points 'x1,..,xd;y1,..,yd' (default: origin)")
    e.add_argument("--budget", type=int, default=cs.DEFAULT_BUDGET)

    r = sub.add_parser("critical", parents=[common], help="p1, G-H decomposition and estimates from a census file")
    r.add_argument("--from", dest="source", required=True)
    r.add_argument("--tol", type=float, default=1e-12)
    r.add_argument("--nmax", type=int, default=40, help="convolution order for leading-order predictions")
    r.add_argument("--budget", type=int, default=cs.DEFAULT_BUDGET)

    sub.add_parser("check", parents=[common], help="run the cross-module consistency suite")
    return p


# ---------------------------------------------------------------------------
# report builders


def _num(q: Fraction, digits: int) -> dict:
    return {"exact": frac_str(q), "decimal": decimal_str(q, digits)}


def _validate_lattice(args) -> None:
    if args.d < 1:
        raise UsageError(f"--d must be >= 1, got {args.d}")
    if args.L < 1:
        raise UsageError(f"--L must be >= 1, got {args.L}")


def cmd_kernel(args) -> dict:
    _validate_lattice(args)
    if args.nmax < 2:
        raise UsageError(f"--nmax must be >= 2, got {args.nmax}")
    kernel = kn.build_kernel(args.d, args.L, args.norm)
    table = kn.conv_table(kernel, args.nmax)
    digits = args.precision
    rows = [{"n": n, **_num(v, digits)} for n, v in enumerate(table.values)]
    tails = {}
    for t in (2, 3):
        if table.tail_valid:
            s = kn.s_geq(table, t)
            tails[f"s_geq_{t}"] = {**_num(s.value, digits), "error": s.error}
        else:
            tails[f"s_geq_{t}"] = None
    return {
        "command": "kernel",
        "params": {"d": args.d, "L": args.L, "norm": kernel.norm, "nmax": args.nmax},
        "lambda_size": kernel.lambda_size,
        "rows": rows,
        **tails,
        "tail_bound": table.tail_bound if table.tail_valid else None,
        "tail_valid": table.tail_valid,
        "_columns": ["n", "exact", "decimal"],
    }


def cmd_constants(args) -> dict:
    if args.d <= 4:
        raise UsageError(f"constants need --d >= 5, got {args.d}")
    if args.nmax < 10:
        raise UsageError(f"--nmax must be >= 10, got {args.nmax}")
    digits = args.precision
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rep = ct.constants_report(args.d, args.nmax, args.l_range)
    notes = sorted({str(w.message) for w in caught})
    for msg in notes:
        print(f"warning: {msg}", file=sys.stderr)
    rows = [{"n": n, **_num(u, digits)} for n, u in enumerate(rep.u_table, start=1)]
    return {
        "command": "constants",
        "params": {"d": args.d, "nmax": args.nmax, "l_range": [args.l_range[0], args.l_range[-1]]},
        "rows": rows,
        "c_lt": decimal_str(rep.c_lt, digits),
        "c_la": decimal_str(rep.c_la, digits),
        "c_lt_partial": decimal_str(rep.c_lt_partial, digits),
        "la_correction": decimal_str(rep.la_correction, digits),
        "truncation_error": rep.truncation_error,
        "pc_predictions": [
            {"L": L, "model": m, "pc": decimal_str(v, digits)} for L, m, v in rep.pc_predictions
        ],
        "remainder": rep.remainder,
        "notes": notes,
        "_columns": ["n", "exact", "decimal"],
    }


def _parse_required(text: str | None, d: int):
    if text is None:
        return None
    try:
        pts = [tuple(int(c) for c in part.split(",")) for part in text.split(";") if part.strip()]
    except ValueError:
        raise UsageError(f"cannot parse --required {text!r}") from None
    if any(len(x) != d for x in pts):
        raise UsageError(f"--required points must have {d} coordinates")
    return pts


def cmd_enumerate(args) -> str:
    _validate_lattice(args)
    if args.max_vertices < 1:
        raise UsageError(f"--max-vertices must be >= 1, got {args.max_vertices}")
    census = cs.enumerate_polymers(
        args.model, args.d, args.L, args.norm, _parse_required(args.required, args.d), args.max_vertices, args.budget
    )
    return cs.dumps_census(census)


def cmd_critical(args) -> dict:
    census = cs.read_census(args.source)
    if not census.rooted_at_origin:
        raise UsageError("critical needs a census with required = {o}")
    digits = args.precision
    g = cs.one_point_series(census)
    sol = cr.solve_p1(g, args.tol)
    chi = cs.chi_from_census(census)
    ratio = cr.pc_ratio_estimate(chi)

    g_full, tau = cs.two_point_table(census.model, census.d, census.L, census.norm, census.max_vertices, args.budget)
    if g_full.coefficients != g.coefficients:
        raise UsageError("census file does not match a fresh enumeration with its own header")
    kernel = kn.build_kernel(census.d, census.L, census.norm)
    table = kn.conv_table(kernel, args.nmax) if census.d >= 3 and kernel.norm == "sup" else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        dec = cr.gh_decompose(census.model, g, tau, sol.p1, list(kernel.offsets()), table)
        p1_leading = cr.predict_p1_lattice(census.model, table).value if table and census.d >= 5 else None
    window = (census.max_vertices - 1) * census.L
    diag = cr.diagnostics(census.lambda_size, tau, sol.p1, window)

    growth = None
    if census.model == "trees":
        growth = [decimal_str(v, digits) for v in cs.growth_pc_estimate(cs.tn_table(census), census.lambda_size)]

    ext = dict(zip(ratio.index[1:], ratio.extrapolated))
    rows = [
        {
            "k": k,
            "coefficient": frac_str(chi.coefficients[k]),
            "ratio": decimal_str(r, digits),
            "extrapolated": decimal_str(ext[k], digits) if k in ext else "",
        }
        for k, r in zip(ratio.index, ratio.ratios)
    ]
    return {
        "command": "critical",
        "params": {
            "source": str(args.source),
            "model": census.model,
            "d": census.d,
            "L": census.L,
            "norm": census.norm,
            "max_vertices": census.max_vertices,
            "tol": args.tol,
        },
        "p1": {
            "value": decimal_str(sol.p1, digits),
            "residual": sol.residual,
            "truncation_order": sol.truncation_order,
            "bracket": list(sol.bracket),
        },
        "decomposition": {
            "G": decimal_str(dec.G, digits),
            "H_effective": decimal_str(dec.H_effective, digits),
            "g": decimal_str(dec.g, digits),
            "leading_predictions": {
                key: (None if v is None else decimal_str(v, digits)) for key, v in dec.leading_predictions.items()
            },
            "p1_leading_order": None if p1_leading is None else decimal_str(p1_leading, digits),
        },
        "diagnostics": {
            "triangle_lb": decimal_str(diag.triangle_lb, digits),
            "hath_ub": decimal_str(diag.hath_ub, digits),
            "window_radius": diag.window_radius,
        },
        "growth_estimates": growth,
        "ratio_skipped": list(ratio.skipped),
        "rows": rows,
        "_columns": ["k", "coefficient", "ratio", "extrapolated"],
    }


def cmd_check(args) -> dict:
    from .checks import run_checks

    results = run_checks()
    rows = [
        {"name": r.name, "passed": r.passed, "seconds": round(r.seconds, 2), "detail": r.detail} for r in results
    ]
    return {
        "command": "check",
        "passed": all(r.passed for r in results),
        "rows": rows,
        "_columns": ["name", "passed", "seconds", "detail"],
    }


# ---------------------------------------------------------------------------
# rendering


def render(report: dict, fmt: str) -> str:
    columns = report.get("_columns", [])
    body = {k: v for k, v in report.items() if not k.startswith("_")}
    if fmt == "json":
        return json.dumps({"schema_version": SCHEMA_VERSION, **body}, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        writer.writerows(report["rows"])
        return buf.getvalue()
    lines = []
    for key in sorted(body):
        if key == "rows":
            continue
        lines.append(f"{key}: {json.dumps(body[key], sort_keys=True)}")
    rows = report.get("rows", [])
    if columns:
        cells = [[str(r.get(c, "")) for c in columns] for r in rows]
        if report.get("command") in ("kernel", "constants"):
            cells = [[r[0], r[2]] for r in cells]  # exact rationals are too wide for a table
            cols = [columns[0], columns[2]]
        else:
            cols = columns
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
        lines.append("")
        lines.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


COMMANDS = {
    "kernel": cmd_kernel,
    "constants": cmd_constants,
    "enumerate": cmd_enumerate,
    "critical": cmd_critical,
    "check": cmd_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.command](args)
        text = result if isinstance(result, str) else render(result, args.format)
        _emit(text, args.out)
    except cs.CensusBudgetError as exc:
        print(f"error: {exc} (reduce --{exc.parameter.replace('_', '-')})", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, OSError, cr.SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, dict) and result.get("command") == "check" and not result["passed"]:
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
