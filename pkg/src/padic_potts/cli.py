"""Command-line front end.

Every subcommand prints a deterministic report (JSON by default) and exits
with 0 on success, 2 when the requested object does not exist mathematically
(no square root, no such fixed point, ...), and 1 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from . import dynamics, phase, potts
from .errors import (
    EnumerationTooLarge,
    MeasureUndefined,
    NoSquareRoot,
    NotAFixedPoint,
    PadicError,
    ZeroAtPrecision,
)
from .padic import PadicNumber, PrecisionConfig, from_rational, padic_sqrt
from .tree import configuration_classes, level, parse_vertex, vertex_label

EXIT_OK, EXIT_USAGE, EXIT_NONEXISTENT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- parsing helpers -----------------------------------------------------------------


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational number: {text!r}") from exc


def parse_range(text: str) -> list[int]:
    """``"a:b"`` (inclusive) or a comma list."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",") if t]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc


def precision_from(args) -> PrecisionConfig:
    K = args.precision
    if K is None:
        K = int(os.environ.get("PADIC_PRECISION", "64"))
    try:
        return PrecisionConfig(K)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def params_from(args) -> potts.ModelParams:
    if args.p is None or args.q is None or args.N is None:
        raise UsageError("this command needs -p, -q and -N")
    try:
        return potts.ModelParams(args.p, args.q, args.N, args.k, precision_from(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _field_entry(entry, p: int, cfg: PrecisionConfig) -> PadicNumber:
    if isinstance(entry, str):
        return from_rational(parse_rational(entry), 1, p, cfg)
    if isinstance(entry, dict):
        if "prime" in entry:
            return PadicNumber.from_json(entry)
        digits, val = entry["digits"], entry["valuation"]
    else:
        val, digits = entry
    unit = sum(d * p**i for i, d in enumerate(digits))
    return PadicNumber(p, val, unit, min(len(digits), cfg.K))


def load_field(path: str, params: potts.ModelParams, depth: int) -> potts.BoundaryField:
    """Read a field file: a JSON object from vertex labels ``"i1.i2"`` to
    ``q+1`` entries, each ``{"valuation": v, "digits": [d0, d1, ...]}``,
    ``[v, [d0, d1, ...]]`` or an exact ``"a/b"`` string."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read field file {path}: {exc}") from exc
    values = {}
    for label, entries in raw.items():
        if len(entries) != params.q + 1:
            raise UsageError(f"vertex {label}: expected {params.q + 1} entries")
        values[parse_vertex(label)] = tuple(_field_entry(e, params.p, params.cfg) for e in entries)
    for m in range(1, depth + 1):
        for x in level(params.k, m):
            if x not in values:
                raise UsageError(f"field file has no vector for vertex {vertex_label(x)}")
    return potts.BoundaryField.per_vertex(params.q, values)


def field_from_spec(spec: str, params: potts.ModelParams, depth: int) -> potts.BoundaryField:
    if spec.startswith("fixed:"):
        label = spec.split(":", 1)[1].lstrip("x")
        if label not in ("0", "1", "2"):
            raise UsageError("use --field fixed:0, fixed:1 or fixed:2")
        return phase.invariant_field(int(label), params)
    if spec.startswith("file:"):
        return load_field(spec.split(":", 1)[1], params, depth)
    raise UsageError(f"unknown --field value {spec!r}")


# -- output ---------------------------------------------------------------------------


def flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key in sorted(obj):
            yield from flatten(obj[key], f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, item in enumerate(obj):
            yield from flatten(item, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(payload, fmt: str, rows: list | None = None) -> str:
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if rows:
            header = list(rows[0])
            writer.writerow(header)
            for row in rows:
                writer.writerow([json.dumps(row[h]) if isinstance(row[h], (list, dict)) else row[h] for h in header])
        else:
            writer.writerow(["key", "value"])
            for key, value in flatten(payload):
                writer.writerow([key, json.dumps(value) if isinstance(value, list) else value])
        return buf.getvalue().rstrip("\n")
    return "\n".join(f"{k}: {json.dumps(v) if isinstance(v, list) else v}" for k, v in flatten(payload))


# -- commands ---------------------------------------------------------------------------


def cmd_sqrt(args):
    if args.p is None:
        raise UsageError("sqrt needs -p")
    if not potts.is_prime(args.p):
        raise UsageError(f"p = {args.p} is not prime")
    cfg = precision_from(args)
    a = from_rational(parse_rational(args.value), 1, args.p, cfg)
    trace = {"value": a.to_json()}
    if not a.is_exact_zero:
        digits = a.digits()
        trace["valuation_even"] = a.valuation % 2 == 0
        trace["leading_digit"] = digits[0]
        if args.p == 2:
            trace["a1_a2"] = digits[1:3]
    try:
        root, other = padic_sqrt(a)
    except NoSquareRoot as exc:
        trace.update(exists=False, reason=exc.condition)
        return trace, EXIT_NONEXISTENT, None
    trace.update(exists=True, reason="conditions met", roots=[root.to_json(), other.to_json()])
    return trace, EXIT_OK, None


def cmd_fixed_points(args):
    return dynamics.fixed_points(params_from(args)).to_json(), EXIT_OK, None


def cmd_classify(args):
    params = params_from(args)
    if args.point:
        label = args.point
        report = dynamics.fixed_points(params)
        if label in ("x0", "x1", "x2"):
            if label not in report.points:
                return {"point": label, "exists": False, "reason": report.reason}, EXIT_NONEXISTENT, None
            x = report.value(label)
        else:
            x = params.number(parse_rational(label))
        try:
            c = dynamics.classify_fixed_point(x, params)
        except NotAFixedPoint as exc:
            return {"point": label, "error": str(exc)}, EXIT_NONEXISTENT, None
        return {"point": label, **c.to_json()}, EXIT_OK, None
    report = dynamics.fixed_points(params)
    out = {}
    for label, info in sorted(report.points.items()):
        out[label] = dynamics.classify_fixed_point(info.value, params).to_json()
    return {"params": params.to_json(), "classification": out}, EXIT_OK, None


def cmd_orbit(args):
    params = params_from(args)
    x = params.number(parse_rational(args.start))
    res = dynamics.iterate_orbit(x, params, args.max_iter)
    return {"params": params.to_json(), "start": args.start, **res.to_json()}, EXIT_OK, None


def cmd_compat_check(args):
    params = params_from(args)
    try:
        h = field_from_spec(args.field, params, args.depth)
    except MeasureUndefined as exc:
        return {"error": str(exc)}, EXIT_NONEXISTENT, None
    report = potts.compatibility_check(args.depth, h, params, args.tol, cap=args.cap)
    return {"params": params.to_json(), "field": args.field, **report.to_json()}, EXIT_OK, None


def cmd_measure_norms(args):
    params = params_from(args)
    try:
        formula = phase.norm_formula(args.measure, params)
    except MeasureUndefined as exc:
        return {"measure": args.measure, "exists": False, "reason": str(exc)}, EXIT_NONEXISTENT, None
    grouped = {}
    for cls in configuration_classes(args.depth, params.q, params.k, args.cap):
        count = sum(s == 1 for s in cls.leaves)
        key = (cls.matches, count)
        grouped[key] = grouped.get(key, 0) + cls.count
    rows = [
        {
            "matched_edges": m,
            "leaf_ones": c,
            "configurations": n,
            "exponent": formula.exponent(args.depth, c, params.N * m),
        }
        for (m, c), n in sorted(grouped.items())
    ]
    b = phase.boundedness(args.measure, params, max(args.depth, 4))
    payload = {
        "params": params.to_json(),
        "measure": args.measure,
        "depth": args.depth,
        "formula": formula.to_json(),
        "boundedness": b.to_json(),
        "table": rows,
    }
    return payload, EXIT_OK, rows


def cmd_phase(args):
    params = params_from(args)
    return phase.phase_diagnosis(params, args.n_max).to_json(), EXIT_OK, None


def cmd_phase_diagram(args):
    rows = []
    for p in sorted(parse_range(args.p_list)):
        for q in sorted(parse_range(args.q_range)):
            for N in sorted(parse_range(args.n_range)):
                if N == 0:
                    continue
                try:
                    params = potts.ModelParams(p, q, N, args.k, precision_from(args))
                except ValueError as exc:
                    raise UsageError(str(exc)) from exc
                rep = phase.phase_diagnosis(params, args.n_max)
                fp = dynamics.fixed_points(params)
                rows.append({"p": p, "q": q, "N": N, "roots_exist": fp.exists, "verdict": rep.verdict})
    return {"grid": rows}, EXIT_OK, rows


def cmd_self_test(args):
    from .selftest import run_all

    results = run_all(seed=args.seed, samples=args.samples)
    ok = all(r["passed"] for r in results)
    return {"passed": ok, "checks": results}, EXIT_OK if ok else EXIT_USAGE, results


# -- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", type=int, help="prime")
    common.add_argument("-q", type=int, help="number of states minus one")
    common.add_argument("-N", type=int, help="coupling exponent, theta = p^N")
    common.add_argument("-k", type=int, default=2, help="branching of the tree")
    common.add_argument("-K", "--precision", type=int, default=None, help="relative precision in digits")
    common.add_argument("--cap", type=int, default=2**24, help="enumeration cap")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None, help="default json (csv for phase-diagram)")
    common.add_argument("--seed", type=int, default=0)

    parser = _Parser(prog="padic-potts", description="p-adic Potts model toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sqrt", parents=[common], help="p-adic square root with existence trace")
    s.add_argument("value", help="rational a/b")
    s.set_defaults(func=cmd_sqrt)

    s = sub.add_parser("fixed-points", parents=[common], help="fixed points of f")
    s.set_defaults(func=cmd_fixed_points)

    s = sub.add_parser("classify", parents=[common], help="attractive / neutral / repelling")
    s.add_argument("--point", help="x0, x1, x2 or a rational value")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("orbit", parents=[common], help="iterate f from a starting point")
    s.add_argument("--start", required=True)
    s.add_argument("--max-iter", type=int, default=64)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("compat-check", parents=[common], help="finite-volume compatibility")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--field", default="fixed:0", help="fixed:i or file:PATH")
    s.add_argument("--tol", type=int, default=None, help="tolerance exponent (default K-8)")
    s.set_defaults(func=cmd_compat_check)

    s = sub.add_parser("measure-norms", parents=[common], help="norm exponents of mu_i")
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--measure", type=int, choices=(0, 1, 2), required=True)
    s.set_defaults(func=cmd_measure_norms)

    s = sub.add_parser("phase", parents=[common], help="phase-transition verdict")
    s.add_argument("--n-max", type=int, default=8)
    s.set_defaults(func=cmd_phase)

    s = sub.add_parser("phase-diagram", parents=[common], help="CSV grid of verdicts")
    s.add_argument("--p-list", required=True)
    s.add_argument("--q-range", required=True)
    s.add_argument("--n-range", required=True)
    s.add_argument("--n-max", type=int, default=6)
    s.set_defaults(func=cmd_phase_diagram, default_format="csv")

    s = sub.add_parser("self-test", parents=[common], help="quick randomized property checks")
    s.add_argument("--samples", type=int, default=200)
    s.set_defaults(func=cmd_self_test)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, code, rows = args.func(args)
    except UsageError as exc:
        print(f"padic-potts: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationTooLarge as exc:
        print(f"padic-potts: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ZeroAtPrecision, PadicError) as exc:
        print(f"padic-potts: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NONEXISTENT
    fmt = args.format or getattr(args, "default_format", "json")
    print(render(payload, fmt, rows))
    return code


if __name__ == "__main__":
    sys.exit(main())
