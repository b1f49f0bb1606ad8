"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 precondition failed,
3 input/output or parse error, 4 census budget refused.
"""

from __future__ import annotations

import argparse
import ast
import json
import re
import sys
from fractions import Fraction

from . import __version__
from .census import census, jr_profile, kronecker_completeness, kronecker_entry
from .certificates import EnvelopeError, dumps, from_envelope, to_envelope, verify_certificate, with_status
from .constructions import build_sum32, build_unit_pair, build_x_witness, search_four_squares
from .errors import CellBudgetExceeded, TrcertError
from .integrality import probe_mu_trivial
from .poly import cyclotomic, rat, rat_to_str
from .tower import FieldTower

EXIT_OK, EXIT_FAIL, EXIT_PRECONDITION, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3, 4

ELEMENT_HELP = """\
Element literals are either nested-array JSON (as stored in certificates) or
an expression built from integers, + - * / ** and parentheses over these names:
  x, g        the generator of the base field
  s1, s2, ... the square root adjoined at step k
  sqrtN, i    the step root whose radicand is the rational N (i is sqrt-1);
              sqrtN of a rational square N is that rational
  zetaN       the generator when the base is the N-th cyclotomic polynomial
The character "√" may stand for "sqrt", e.g. "1+√2".

Towers are "Q", "Q(sqrt2)", "Q(sqrt2,sqrt3)", "Q(sqrt2,i)", "Q(i)",
"Q(zeta5)" or JSON such as '{"base": ["0/1", "1/1"], "steps": [["2/1"]]}'.
"""


class ParseError(ValueError):
    pass


# ---------------------------------------------------------------------
# parsing towers and elements


def parse_tower(text: str) -> FieldTower:
    text = text.strip().replace("√", "sqrt")
    if text.startswith("{"):
        try:
            return FieldTower.from_json(json.loads(text))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad tower JSON: {exc}") from exc
    if text in ("Q", "QQ"):
        return FieldTower.rationals()
    m = re.fullmatch(r"Q\((.*)\)", text)
    if not m:
        raise ParseError(f"cannot parse tower {text!r}")
    parts = [p.strip() for p in m.group(1).split(",") if p.strip()]
    z = re.fullmatch(r"zeta(\d+)", parts[0]) if parts else None
    if z:
        tower = FieldTower.make_base(cyclotomic(int(z.group(1))))
        parts = parts[1:]
    else:
        tower = FieldTower.rationals()
    for p in parts:
        if p == "i":
            radicand = Fraction(-1)
        else:
            s = re.fullmatch(r"sqrt\(?(-?\d+(?:/\d+)?)\)?", p)
            if not s:
                raise ParseError(f"cannot parse tower generator {p!r}")
            radicand = rat(s.group(1))
        tower = tower.adjoin_sqrt(tower.rational(radicand))
    return tower


def _named(tower: FieldTower, name: str):
    if name in ("x", "g"):
        return tower.gen()
    m = re.fullmatch(r"s(\d+)", name)
    if m:
        return tower.root(int(m.group(1)))
    if name == "i":
        name = "sqrtm1"
    m = re.fullmatch(r"sqrt(m?)(\d+)", name)
    if m:
        q = Fraction(int(m.group(2)) * (-1 if m.group(1) else 1))
        for k in range(1, tower.height + 1):
            d = tower.delta(k)
            if d.is_rational() and d.rational_value() == q:
                return tower.root(k)
        if q >= 0:
            r = Fraction(int(q.numerator**0.5 + 0.5))
            if r * r == q:
                return tower.rational(r)
        raise ParseError(f"tower has no step with radicand {q}")
    m = re.fullmatch(r"zeta(\d+)", name)
    if m:
        if tower.base != cyclotomic(int(m.group(1))):
            raise ParseError(f"base polynomial is not the {m.group(1)}-th cyclotomic polynomial")
        return tower.gen()
    raise ParseError(f"unknown name {name!r}")


def parse_element(tower: FieldTower, text: str):
    text = text.strip()
    if text.startswith("["):
        try:
            return tower.element_from_json(json.loads(text))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"bad element JSON: {exc}") from exc
    text = re.sub(r"√\(", "sqrt(", text)
    text = re.sub(r"√(\d+)", r"sqrt\1", text)
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse element {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return tower.rational(node.value)
        if isinstance(node, ast.Name):
            return _named(tower, node.id)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1:
            arg = node.args[0]
            neg = isinstance(arg, ast.UnaryOp) and isinstance(arg.op, ast.USub)
            inner = arg.operand if neg else arg
            if isinstance(inner, ast.Constant) and isinstance(inner.value, int):
                return _named(tower, f"sqrt{'m' if neg else ''}{inner.value}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                neg = isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub)
                inner = exp.operand if neg else exp
                if not (isinstance(inner, ast.Constant) and isinstance(inner.value, int)):
                    raise ParseError("exponents must be integer literals")
                return ev(node.left) ** (-inner.value if neg else inner.value)
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                return a / b
        raise ParseError(f"unsupported syntax in element {text!r}")

    return ev(tree)


def parse_range(text: str):
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if m:
        return list(range(int(m.group(1)), int(m.group(2)) + 1))
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParseError(f"cannot parse integer list {text!r}") from exc


def parse_rationals(text: str):
    try:
        return [rat(v) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse rationals {text!r}") from exc


# ---------------------------------------------------------------------
# output helpers


def _emit(text: str):
    sys.stdout.write(text)


def _emit_json(obj):
    _emit(json.dumps(obj, indent=2) + "\n")


def _error(kind: str, message: str, **extra):
    _emit_json({"error": kind, "message": message, **extra})


def _write(path, text):
    if path in (None, "-"):
        _emit(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------
# commands


def cmd_construct(args) -> int:
    tower = parse_tower(args.tower)
    kind = args.kind.replace("-", "_")
    if kind == "unit_pair":
        cert = build_unit_pair(parse_element(tower, _required(args.d, "--d")))
    elif kind == "sum32":
        cert = build_sum32(parse_element(tower, _required(args.d, "--d")))
    elif kind == "x_witness":
        cert = build_x_witness(parse_element(tower, _required(args.alpha, "--alpha")))
    else:
        x = parse_element(tower, _required(args.x, "--x"))
        t = rat(args.t)
        cert = search_four_squares(x, t.numerator, t.denominator, args.bound)
        if cert is None:
            _error("NotFound", f"no certificate with height bound {args.bound}")
            return EXIT_FAIL
    env = to_envelope(cert, reproducible=args.reproducible)
    _write(args.output, dumps(env))
    return EXIT_OK


def _required(value, flag):
    if value is None:
        raise ParseError(f"{flag} is required for this certificate kind")
    return value


def cmd_verify(args) -> int:
    try:
        with open(args.path, encoding="utf-8") as fh:
            env = json.load(fh)
    except OSError as exc:
        _error("IOError", str(exc))
        return EXIT_IO
    except json.JSONDecodeError as exc:
        _error("ParseError", f"malformed JSON: {exc}")
        return EXIT_IO
    try:
        cert = from_envelope(env)
    except EnvelopeError as exc:
        _error("ParseError", str(exc))
        return EXIT_IO
    report = verify_certificate(cert)
    if args.json:
        _emit_json(report.to_json())
    else:
        for c in report.clauses:
            line = f"{c.status.upper():4}  {c.label}"
            if c.detail:
                line += f"  ({c.detail})"
            _emit(line + "\n")
        _emit(("PASS" if report.ok else f"FAIL at {report.first_failure.label}") + "\n")
    if args.update:
        with open(args.path, "w", encoding="utf-8") as fh:
            fh.write(dumps(with_status(env, report)))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_census(args) -> int:
    table = census(args.degree, rat(args.t), args.budget, args.workers)
    if args.json:
        _emit_json(table.to_json())
        return EXIT_OK
    _emit(f"census D={table.D} t={rat_to_str(table.t)}\n")
    for e in table.entries:
        _emit(f"  {e.degree}  {e.poly}\n")
    counts = ", ".join(f"deg {k}: {v}" for k, v in table.counts.items())
    _emit(f"entries: {len(table.entries)} ({counts}); elements: {table.element_count}\n")
    return EXIT_OK


def cmd_kronecker(args) -> int:
    if args.completeness is not None:
        rep = kronecker_completeness(args.completeness, args.budget, args.workers)
        if args.json:
            _emit_json(rep.to_json())
        else:
            _emit(f"D={rep.D}: census {len(rep.census_polys)} entries, kappa family {len(rep.kronecker)} entries\n")
            for p in rep.missing_from_census:
                _emit(f"  missing from census: {p}\n")
            for p in rep.not_in_kronecker:
                _emit(f"  not a kappa_n: {p}\n")
            _emit("PASS\n" if rep.ok else "FAIL\n")
        return EXIT_OK if rep.ok else EXIT_FAIL
    entries = [kronecker_entry(n) for n in parse_range(args.n)]
    if args.json:
        _emit_json([e.to_json() for e in entries])
    else:
        for e in entries:
            _emit(f"{e.n:4d}  {e.degree:3d}  {e.poly}\n")
    return EXIT_OK


def cmd_probe_mu(args) -> int:
    tower = parse_tower(args.tower)
    extra = [parse_element(tower, s) for s in args.extra or []]
    rep = probe_mu_trivial(tower, args.m, parse_range(args.orders), extra)
    if args.json:
        _emit_json(rep.to_json())
    else:
        for r in rep.to_json()["orders"]:
            _emit(f"order {r['order']}: {r['roots_found']} roots found, status {r['status']}\n")
        _emit("PASS\n" if rep.ok else "FAIL\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_profile(args) -> int:
    prof = jr_profile(args.degree, parse_rationals(args.ts), args.budget, args.workers)
    if args.json:
        _emit_json(prof.to_json())
    else:
        _emit(prof.to_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trcert",
        description="Exact unit certificates, four-squares certificates and JR censuses.",
        epilog=ELEMENT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=f"trcert {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a certificate", epilog=ELEMENT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    c.add_argument("kind", choices=["unit-pair", "sum32", "x-witness", "four-squares"])
    c.add_argument("--tower", default="Q")
    c.add_argument("--d", help="element d (unit-pair, sum32)")
    c.add_argument("--alpha", help="element alpha (x-witness)")
    c.add_argument("--x", help="element x (four-squares)")
    c.add_argument("--t", default="4", help="rational bound a/b (four-squares)")
    c.add_argument("--bound", type=int, default=8, help="height bound (four-squares)")
    c.add_argument("-o", "--output", help="output path (default stdout)")
    c.add_argument("--reproducible", action="store_true", help="omit the provenance timestamp")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="verify a certificate envelope")
    v.add_argument("path")
    v.add_argument("--json", action="store_true")
    v.add_argument("--update", action="store_true", help="write the verification status into the file")
    v.set_defaults(func=cmd_verify)

    def census_flags(q):
        q.add_argument("--json", action="store_true")
        q.add_argument("--budget", type=int, default=None, help="cell budget (default TRCERT_CELL_BUDGET or 1e8)")
        q.add_argument("--workers", type=int, default=1)

    s = sub.add_parser("census", help="algebraic integers of degree <= D with conjugates in (0, t)")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--t", required=True)
    census_flags(s)
    s.set_defaults(func=cmd_census)

    k = sub.add_parser("kronecker", help="minimal polynomials of zeta_n + 1/zeta_n + 2")
    k.add_argument("--n", default="3..12", help="range a..b or comma list")
    k.add_argument("--completeness", type=int, metavar="D", help="compare census(D, 4) with the family")
    census_flags(k)
    k.set_defaults(func=cmd_kronecker)

    m = sub.add_parser("probe-mu", help="check that nontrivial roots of unity avoid R_m")
    m.add_argument("--tower", required=True)
    m.add_argument("--m", type=int, required=True)
    m.add_argument("--orders", required=True)
    m.add_argument("--extra", action="append", help="extra candidate root of unity")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_probe_mu)

    r = sub.add_parser("profile", help="element counts of the census over several t (CSV)")
    r.add_argument("--degree", type=int, required=True)
    r.add_argument("--ts", required=True, help="comma-separated rationals")
    census_flags(r)
    r.set_defaults(func=cmd_profile)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CellBudgetExceeded as exc:
        _error("CellBudgetExceeded", str(exc), needed=exc.needed, budget=exc.budget)
        return EXIT_BUDGET
    except (ParseError, EnvelopeError) as exc:
        _error("ParseError", str(exc))
        return EXIT_IO
    except OSError as exc:
        _error("IOError", str(exc))
        return EXIT_IO
    except TrcertError as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
