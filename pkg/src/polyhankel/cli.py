"""``polyhankel`` command line.

Exit codes: 0 success (a non-compact verdict is a result), 2 invalid input,
3 unreachable counterexample budget.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import jsonschema

from . import numeric
from .asymptotics import InsufficientPath, RatioExperiment, check_convergence, ratio_sequence, window_stable
from .counterexample import BudgetUnreachable, build_counterexample, hs_sum_check, no_decomposition_witness
from .hankel import (
    IndexBox,
    PathSpecError,
    compactness_certificate,
    decay_limit,
    diagonal_sweep,
    hankel_gram,
    obstruction_path,
    parse_path,
    path_points,
)
from .moments import MeasureError, ProductMeasure, SupportGap, c_index
from .numeric import format_real, format_scalar
from .quadrature import QuadratureRule
from .reports import csv_text, emit, json_text, load_measure, table_json
from .symbols import Symbol, SymbolParseError, cesaro_mean, fejer_weight, msub, parse_symbol, quasi_part

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3

DEFAULT_MODE = {"counterexample": numeric.FLOAT}
REQUIRED_MODE = {"certify": numeric.EXACT, "counterexample": numeric.FLOAT}


class UsageError(ValueError):
    pass


def _idx(m) -> str:
    return ";".join(map(str, m))


def _write_table(args, kind, header, rows, **extra):
    rows = list(rows)
    if args.format == "json":
        emit(json_text(table_json(kind, header, rows, **extra)), args.out)
    else:
        emit(csv_text(header, rows), args.out)


def _measure(args, n_hint: int | None) -> ProductMeasure:
    if args.measure:
        pm = load_measure(args.measure)
        if args.n is not None and args.n != pm.n:
            raise UsageError(f"--n {args.n} disagrees with the measure config (n={pm.n})")
    else:
        n = args.n if args.n is not None else n_hint
        if n is None:
            raise UsageError("dimension unknown: give --n, --measure or a symbol")
        pm = ProductMeasure.power_weight(n)
    if getattr(args, "allow_support_gap", False):
        try:
            return pm.validate()
        except SupportGap as exc:
            print(f"warning: {exc}; continuing as a negative control", file=sys.stderr)
            return pm
    return pm.validate()


def _symbol(args, required: bool = True) -> Symbol | None:
    if not args.symbol:
        if required:
            raise UsageError("--symbol is required")
        return None
    return parse_symbol(args.symbol, args.n)


def _setup(args, symbol_required=True):
    f = _symbol(args, symbol_required)
    pm = _measure(args, f.n if f is not None else None)
    if f is not None and f.n != pm.n:
        if f.n > pm.n:
            raise UsageError(f"symbol uses coordinate {f.n} but the measure has n={pm.n}")
        f = Symbol(pm.n, [((u + (0,) * (pm.n - f.n), v + (0,) * (pm.n - f.n)), a) for (u, v), a in f])
    return pm, f


def _cap(args, default: int) -> int:
    N = default if args.N is None else args.N
    if N < 0:
        raise UsageError("-N must be nonnegative")
    return N


# ---------------------------------------------------------------------------
# commands


def cmd_moments(args) -> int:
    pm, _ = _setup(args, symbol_required=False)
    box = IndexBox(pm.n, _cap(args, 3))
    header = [f"m{j + 1}" for j in range(pm.n)] + ["c_m"]
    rows = [list(m) + [format_real(c_index(pm, m))] for m in box]
    _write_table(args, "moments", header, rows)
    return EXIT_OK


def cmd_gram(args) -> int:
    pm, f = _setup(args)
    box = IndexBox(pm.n, _cap(args, 6 if numeric.is_exact() else 12))
    method = "dense" if args.workers and args.workers > 1 else "fast"
    G = hankel_gram(pm, f, box, method=method, workers=args.workers)
    header = ["row", "col", "m", "k", "value"]
    rows = []
    for m, k, val in G.cells():
        if args.nonzero and (m, k) not in G.raw:
            continue
        rows.append([box.position(m), box.position(k), _idx(m), _idx(k), format_scalar(val)])
    _write_table(args, "gram", header, rows, diagonal=G.is_diagonal(0.0 if numeric.is_exact() else args.tol))
    return EXIT_OK


def _default_decay_path(pm, f):
    v = compactness_certificate(pm, f) if pm.n > 1 and numeric.is_exact() else None
    if v is not None and not v.compact:
        op = obstruction_path(f, v)
        return path_points(pm.n, op.frozen, op.driven, op.start, 50)
    return path_points(pm.n, {}, range(pm.n), 0, 50)


def cmd_decay(args) -> int:
    pm, f = _setup(args)
    path = parse_path(args.path, pm.n) if args.path else _default_decay_path(pm, f)
    values = diagonal_sweep(pm, f, path)
    header = ["step"] + [f"m{j + 1}" for j in range(pm.n)] + ["lambda", "decimal"]
    rows = [[i] + list(m) + [format_real(x), repr(float(x))] for i, (m, x) in enumerate(zip(path, values))]
    extra = {}
    if len(values) >= 5:
        tol = 0 if numeric.is_exact() and args.tol is None else (args.tol or 1e-3)
        extra["stabilized"] = window_stable(values, tol)
    _write_table(args, "decay", header, rows, **extra)
    return EXIT_OK


def cmd_certify(args) -> int:
    pm, f = _setup(args)
    v = compactness_certificate(pm, f)
    report = {"kind": "verdict", **v.to_json(), "symbol": f.to_literal()}
    if not v.compact:
        op = obstruction_path(f, v)
        frozen = {f"{j + 1}": val for j, val in sorted(op.frozen.items())}
        report["obstruction"] = {
            "frozen": frozen,
            "driven": [j + 1 for j in op.driven],
            "limit": format_real(decay_limit(pm, quasi_part(f, v.witness_s), op.frozen)),
        }
    emit(json_text(report), args.out)
    return EXIT_OK


def cmd_cesaro(args) -> int:
    pm, f = _setup(args)
    N = _cap(args, 1)
    if N < 1:
        raise UsageError("Cesaro means need N >= 1")
    g = cesaro_mean(f, N)
    header = ["u", "v", "s", "weight", "coefficient", "mean_coefficient"]
    rows = []
    for (u, v), a in f:
        s = msub(u, v)
        b = g.terms.get((u, v))
        rows.append([_idx(u), _idx(v), _idx(s), format_real(fejer_weight(s, N)), format_scalar(a),
                     format_scalar(b) if b is not None else "0"])
    if args.format == "json":
        emit(json_text(table_json("cesaro", header, rows, N=N, mean=g.to_literal())), args.out)
    else:
        emit(csv_text(header, rows), args.out)
    return EXIT_OK


def _shift(text, n, name):
    if text is None:
        return (0,) * n
    try:
        vals = [Fraction(x) if numeric.is_exact() else float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--{name} must be comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"--{name} needs {n} entries")
    return tuple(int(x) if isinstance(x, Fraction) and x.denominator == 1 else x for x in vals)


def cmd_limit(args) -> int:
    pm, phi = _setup(args)
    path = parse_path(args.path or "drive:1..1000", pm.n)
    delta = _shift(args.delta, pm.n, "delta")
    beta = _shift(args.beta, pm.n, "beta")
    exp = RatioExperiment.from_symbol(pm.factors, phi, delta, beta, path)
    seq = ratio_sequence(exp)
    alpha = numeric.to_scalar(exp.alpha)
    header = ["step"] + [f"m{j + 1}" for j in range(pm.n)] + ["ratio", "decimal", "abs_error"]
    rows = [[i] + list(m) + [format_real(x), repr(float(x)), repr(float(abs(x - alpha)))]
            for i, (m, x) in enumerate(zip(path, seq))]
    tol = 1e-2 if args.tol is None else args.tol
    conv = check_convergence(seq, alpha, tol)
    _write_table(args, "limit", header, rows, alpha=format_real(alpha), tol=tol,
                 converged=conv.converged, first_index=conv.first_index)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    n = 2 if args.n is None else args.n
    if args.measure:
        pm = load_measure(args.measure).validate()
    else:
        pm = ProductMeasure.power_weight(n)
    scale = args.budget
    budget = (lambda k: scale / (k * k)) if scale is not None else None
    rule = QuadratureRule(radial_order=args.radial_order, angular_order=args.angular_order)
    try:
        ce = build_counterexample(pm, args.K, kernel_budget=budget, rule=rule)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tol = 1e-2 if args.tol is None else args.tol
    witness = no_decomposition_witness(ce, rule)
    if args.format == "csv":
        header = ["s", "k0", "threshold", "points", "max_abs_Qs", "max_Q0", "bound"]
        rows = [[_idx(r["s"]), r["k0"], repr(r["threshold"]), r["points"], repr(r["max_abs_Qs"]),
                 repr(r["max_Q0"]), repr(r["bound"])] for r in witness["decay_table"]]
        emit(csv_text(header, rows), args.out)
        return EXIT_OK
    hs = hs_sum_check(ce, rule, tol)
    report = {"kind": "counterexample", **ce.manifest()}
    report["hs_sum"] = {"estimate": hs.estimate, "bound": hs.bound, "tol": hs.tol, "passed": hs.passed}
    report["witness"] = {k: v for k, v in witness.items() if k != "decay_table"}
    emit(json_text(report), args.out)
    return EXIT_OK


COMMANDS = {
    "moments": (cmd_moments, "table of c_m over the index box"),
    "gram": (cmd_gram, "Gram matrix of H_f on the truncated basis"),
    "decay": (cmd_decay, "||H_f e_m||^2 along an index path"),
    "certify": (cmd_certify, "compactness verdict for a polynomial symbol"),
    "cesaro": (cmd_cesaro, "Fejer-Cesaro mean of a symbol"),
    "limit": (cmd_limit, "moment-ratio sequence and its convergence"),
    "counterexample": (cmd_counterexample, "build and check the layered counterexample"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--measure", help="JSON measure config (default: PowerWeight(1) in every coordinate)")
    common.add_argument("--symbol", help='symbol literal, e.g. "(3/2+1/2i) z1^2 zbar2"')
    common.add_argument("--n", type=int, help="dimension")
    common.add_argument("-N", type=int, help="index box cap (cesaro: Fejer order)")
    common.add_argument("--mode", choices=[numeric.EXACT, numeric.FLOAT])
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--tol", type=float)
    common.add_argument("--path", help='index path, e.g. "freeze:1=0;drive:2..50"')

    p = argparse.ArgumentParser(prog="polyhankel", description="Hankel operators on Bergman spaces of the polydisc.")
    sub = p.add_subparsers(dest="command", required=True)
    parsers = {}
    for name, (_, help_) in COMMANDS.items():
        parsers[name] = sub.add_parser(name, parents=[common], help=help_, description=help_)
    parsers["gram"].add_argument("--workers", type=int, help="parallel dense assembly over rows")
    parsers["gram"].add_argument("--nonzero", action="store_true", help="only cells that are not exactly zero")
    parsers["limit"].add_argument("--delta", help="numerator shift, comma-separated")
    parsers["limit"].add_argument("--beta", help="denominator shift, comma-separated")
    parsers["limit"].add_argument("--allow-support-gap", action="store_true",
                                  help="run a measure that fails the support condition (negative control)")
    ce = parsers["counterexample"]
    ce.add_argument("-K", type=int, default=8, help="number of layers")
    ce.add_argument("--budget", type=float, help="kernel budget scale c (targets c/k^2)")
    ce.add_argument("--radial-order", type=int, default=32)
    ce.add_argument("--angular-order", type=int, default=16)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cmd = COMMANDS[args.command][0]
    mode = args.mode or DEFAULT_MODE.get(args.command, numeric.EXACT)
    required = REQUIRED_MODE.get(args.command)
    if args.format is None:
        args.format = "json" if args.command in ("certify", "counterexample") else "csv"
    if not hasattr(args, "workers"):
        args.workers = None
    try:
        if required and mode != required:
            raise UsageError(f"{args.command} runs in {required} mode only")
        if args.command == "certify" and args.format != "json":
            raise UsageError("certify writes JSON only")
        with numeric.numeric_mode(mode):
            return cmd(args)
    except BudgetUnreachable as exc:
        print(f"error: BudgetUnreachable: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MeasureError, SymbolParseError, PathSpecError, InsufficientPath, UsageError,
            jsonschema.ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (TypeError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
