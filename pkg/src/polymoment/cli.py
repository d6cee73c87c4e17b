"""Command-line interface.

Exit codes: 0 when a command completes with a verdict, 2 for malformed
input, 3 for numerical failure.
"""

from __future__ import annotations

import argparse
import ast
import json
import math
import operator
import re
import sys
from typing import Callable

from . import config
from . import permutations as perms
from .errors import DegreeError, MomentProblemError, ParseError
from .polycore import Polynomial, format_polynomial, parse_complex, parse_polynomial

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    """Arguments are well formed but inconsistent (for example ``a == b``)."""


# -- endpoint expressions ------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _sqrt(x: complex) -> complex:
    if x.imag != 0 or x.real < 0:
        raise ParseError("sqrt takes a non-negative real argument")
    return complex(math.sqrt(x.real))


def _eval(node: ast.AST) -> complex:
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float, complex)) \
            and not isinstance(node.value, bool):
        return complex(node.value)
    if isinstance(node, ast.Name) and node.id in ("i", "j", "I"):
        return 1j
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        left, right = _eval(node.left), _eval(node.right)
        if isinstance(node.op, ast.Div) and right == 0:
            raise ParseError("division by zero in endpoint expression")
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand))
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
            and len(node.args) == 1 and not node.keywords):
        return _sqrt(_eval(node.args[0]))
    raise ParseError("unsupported element in endpoint expression")


def parse_endpoint(text: str) -> complex:
    """Complex literal or a small expression such as ``-sqrt(3)/2`` or ``1/2+i``."""
    try:
        return parse_complex(text)
    except (ParseError, ValueError):
        pass
    src = re.sub(r"(\d|\.)\s*[iI]\b", r"\1j", text.strip())
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse endpoint {text!r}") from exc
    value = _eval(tree)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ParseError("endpoint is not finite")
    return value


# -- reports -------------------------------------------------------------------


def _c(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise InputError(f"missing -{name}")


def _poly(args) -> Polynomial:
    _need(args, "p")
    P = parse_polynomial(args.p)
    return P


def _endpoints(args) -> tuple[complex, complex]:
    _need(args, "a", "b")
    a, b = parse_endpoint(args.a), parse_endpoint(args.b)
    if a == b:
        raise InputError("endpoints a and b must differ")
    return a, b


def _degree_at_least(P: Polynomial, k: int) -> None:
    if P.degree is None or P.degree < k:
        raise DegreeError(f"P must have degree >= {k}")


def cmd_monodromy(args) -> dict:
    from .continuation import monodromy

    P = _poly(args)
    _degree_at_least(P, 2)
    md = monodromy(P)
    return {"command": "monodromy", "polynomial": format_polynomial(P), "monodromy": md.to_dict(),
            "infinity": perms.format_cycles(md.infinity)}


def _text_monodromy(r: dict) -> str:
    md = r["monodromy"]
    lines = [f"base c = {complex(*md['base'])}"]
    for v, g in zip(md["crit_values"], md["generators"]):
        lines.append(f"g at {complex(*v)}: {g}")
    lines.append(f"product: {r['infinity']}")
    return "\n".join(lines)


def _setup(args):
    from .cactus import extended_setup, path_ab

    P = _poly(args)
    _degree_at_least(P, 2)
    a, b = _endpoints(args)
    md, cx, ext = extended_setup(P, a, b)
    return P, a, b, md, cx, ext, path_ab(cx)


def cmd_cactus(args) -> dict:
    P, a, b, md, cx, ext, path = _setup(args)
    return {"command": "cactus", "polynomial": format_polynomial(P), "a": _c(a), "b": _c(b),
            "cactus": cx.to_dict(), "path": path.to_dict(), "rows": path.format_rows(),
            "_dot": cx.to_dot()}


def _text_cactus(r: dict) -> str:
    p = r["path"]
    lines = ["path: " + " - ".join(p["vertex_sequence"]),
             "weights: " + ", ".join(f"w({s})={w}" for s, w in p["weights"].items()),
             f"skeleton: {p['skeleton']} (length {p['length']})"]
    return "\n".join(lines + r["rows"])


def _integrand(args) -> Polynomial:
    _need(args, "q")
    return parse_polynomial(args.q)


def cmd_moments(args) -> dict:
    from .moments import MOMENT_TOL, moment_sequence

    P = _poly(args)
    _degree_at_least(P, 1)
    q = _integrand(args)
    a, b = _endpoints(args)
    rep = moment_sequence(P, q, a, b, args.moments, args.tol or MOMENT_TOL)
    return {"command": "moments", "report": rep.to_dict()}


def _text_moments(r: dict) -> str:
    rep = r["report"]
    head = rep["verdict"] if rep["first_nonzero"] is None else f"NONZERO at i = {rep['first_nonzero']}"
    return f"{head}; M = {rep['M']}, max |m_i| = {rep['max_abs']:.3e}"


def cmd_criterion(args) -> dict:
    from .moments import CRITERION_TOL, criterion_residuals

    P, a, b, md, cx, ext, path = _setup(args)
    Q = _integrand(args).antiderivative(a)
    rep = criterion_residuals(P, Q, a, b, path, ext, args.samples or 8, args.tol or CRITERION_TOL)
    return {"command": "criterion", "path": path.to_dict(), "rows": path.format_rows(), "report": rep.to_dict()}


def _text_criterion(r: dict) -> str:
    rep = r["report"]
    lines = [f"{row}: residual {res:.3e}" for row, res in zip(r["rows"], rep["residuals"])]
    lines.append(f"|Q(b)| after normalization: {rep['endpoint_residual']:.3e}")
    lines.append(rep["verdict"])
    return "\n".join(lines)


def cmd_puiseux(args) -> dict:
    from .series import (composed_expansion, default_depth, gcd_vanishing_report, inverse_puiseux,
                         truncation_bound)

    P = _poly(args)
    _degree_at_least(P, 1)
    n = P.degree
    out = {"command": "puiseux"}
    if args.q is None:
        K = args.trunc or default_depth(n, 0)
        out["inverse"] = inverse_puiseux(P, K).to_dict()
        return out
    base = parse_endpoint(args.a) if args.a is not None else 0j
    Q = _integrand(args).antiderivative(base)
    if Q.is_zero():
        raise InputError("Q is zero; nothing to expand")
    m = Q.degree
    K = args.trunc or default_depth(n, m)
    u = composed_expansion(P, Q, K)
    out["composed"] = u.to_dict()
    out["gcd_report"] = gcd_vanishing_report(u).to_dict()
    try:
        out["truncation_bound"] = str(truncation_bound(n, m))
    except OverflowError as exc:
        out["truncation_bound"] = f"not materialized: {exc}"
    return out


def _text_puiseux(r: dict) -> str:
    key = "composed" if "composed" in r else "inverse"
    s = r[key]
    lines = [f"{key} expansion, ramification {s['ramification']}"]
    for k, c in enumerate(s["coeffs"], start=s["start"]):
        lines.append(f"  k={k}: {complex(*c)}")
    if "gcd_report" in r:
        g = r["gcd_report"]
        lines.append("coprime-index coefficients vanish" if g["passed"]
                     else f"nonvanishing coprime indices: {g['violations']}")
        lines.append(f"rigorous coefficient count: {r['truncation_bound']}")
    return "\n".join(lines)


def cmd_decompose(args) -> dict:
    from .decompose import common_right_divisor, condition_2, condition_3, reduce, right_divisors

    P = _poly(args)
    _degree_at_least(P, 2)
    out = {"command": "decompose",
           "divisors": [{"degree": W.degree, "W": format_polynomial(W), "P_outer": format_polynomial(Pt)}
                        for W, Pt in right_divisors(P)]}
    if args.q is not None and args.a is not None:
        a, b = _endpoints(args)
        Q = _integrand(args).antiderivative(a)
        out["condition_2"] = condition_2(P, Q, a, b).to_dict()
        out["condition_3"] = condition_3(P, Q, a, b).to_dict()
        if not Q.is_zero():
            crd = common_right_divisor(P, Q)
            out["common_right_divisor"] = None if crd is None else format_polynomial(crd[0])
            out["reduction"] = reduce(P, Q, a, b)
    return out


def _text_decompose(r: dict) -> str:
    lines = [f"degree {d['degree']}: W = {d['W']}; P = P~(W) with P~ = {d['P_outer']}" for d in r["divisors"]]
    for key in ("condition_2", "condition_3"):
        if key in r:
            lines.append(f"{key}: {r[key]['kind']}")
    return "\n".join(lines)


def cmd_classify(args) -> dict:
    from .decompose import classify

    P, a, b, md, cx, ext, path = _setup(args)
    v = classify(P, a, b, ext, cx, path)
    return {"command": "classify", "weights": path.to_dict()["weights"], "verdict": v.to_dict()}


def _text_classify(r: dict) -> str:
    v = r["verdict"]
    lines = [v["verdict"]] + [f"  {x['tag']}: {x['statement']}" for x in v["reasons"]]
    if "L1" in v:
        lines.append(f"  L1 = {v['L1']}, L2 = {v['L2']}")
    return "\n".join(lines + [f"  note: {n}" for n in v["notes"]])


def cmd_check(args) -> dict:
    from .decompose import classify, condition_2, condition_3
    from .moments import CRITERION_TOL, MOMENT_TOL, criterion_residuals, moment_sequence, necessary_residuals
    from .series import composed_expansion, default_depth, gcd_vanishing_report

    P, a, b, md, cx, ext, path = _setup(args)
    q = _integrand(args)
    Q = q.antiderivative(a)
    mom = moment_sequence(P, q, a, b, args.moments, args.tol or MOMENT_TOL)
    out = {"command": "check", "moments": mom.to_dict(), "q_is_zero": q.is_zero(),
           "verdict": "ORTHOGONAL" if mom.vanishes else "NOT_ORTHOGONAL"}
    tol = args.tol or CRITERION_TOL
    out["criterion"] = criterion_residuals(P, Q, a, b, path, ext, args.samples or 8, tol).to_dict()
    out["necessary"] = necessary_residuals(P, Q, a, b, ext, args.samples or 8, tol).to_dict()
    if not Q.is_zero():
        K = args.trunc or default_depth(P.degree, Q.degree)
        out["gcd_report"] = gcd_vanishing_report(composed_expansion(P, Q, K)).to_dict()
    else:
        out["gcd_report"] = None
    out["condition_2"] = condition_2(P, Q, a, b).to_dict()
    out["condition_3"] = condition_3(P, Q, a, b).to_dict()
    out["classification"] = classify(P, a, b, ext, cx, path).to_dict()
    return out


def _text_check(r: dict) -> str:
    lines = [r["verdict"] + (" (q is identically zero)" if r["q_is_zero"] else ""),
             f"moments: {_text_moments({'report': r['moments']})}",
             f"criterion: {r['criterion']['verdict']}",
             f"necessary condition: {r['necessary']['verdict']}"]
    if r["gcd_report"] is not None:
        lines.append(f"coprime-index vanishing: {'pass' if r['gcd_report']['passed'] else 'fail'}")
    lines.append(f"condition_2: {r['condition_2']['kind']}; condition_3: {r['condition_3']['kind']}")
    lines.append(f"classification: {r['classification']['verdict']}")
    return "\n".join(lines)


COMMANDS: dict[str, tuple[Callable, Callable, str]] = {
    "monodromy": (cmd_monodromy, _text_monodromy, "monodromy generators of P"),
    "cactus": (cmd_cactus, _text_cactus, "extended cactus, path between a and b, weights, skeleton"),
    "criterion": (cmd_criterion, _text_criterion, "branch-relation residuals for q on [a, b]"),
    "moments": (cmd_moments, _text_moments, "exact moments of q against powers of P"),
    "puiseux": (cmd_puiseux, _text_puiseux, "Puiseux expansion of P^-1 (or of Q(P^-1) with -q)"),
    "decompose": (cmd_decompose, _text_decompose, "right divisors and composition certificates"),
    "check": (cmd_check, _text_check, "full orthogonality pipeline"),
    "classify": (cmd_classify, _text_classify, "definiteness of the collection (P, a, b)"),
}


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", help="polynomial P: coefficients lowest degree first, or chebyshev:N")
    common.add_argument("-q", help="integrand q in the same format")
    common.add_argument("-a", help="left endpoint (complex literal or expression like -sqrt(3)/2)")
    common.add_argument("-b", help="right endpoint")
    common.add_argument("--precision", choices=config.PRECISIONS, default="double")
    common.add_argument("--trunc", type=_positive_int, help="series truncation depth K")
    common.add_argument("--moments", type=_positive_int, help="highest moment index M")
    common.add_argument("--samples", type=_positive_int, help="number of criterion sample points")
    common.add_argument("--tol", type=_positive_float, help="override the verdict tolerance")
    common.add_argument("--format", choices=("json", "text", "dot"), default="json")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for root-finder initial perturbations")
    parser = argparse.ArgumentParser(prog="polymoment",
                                     description="Orthogonality of polynomials to all powers of P on a segment.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, _, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    run, text, _ = COMMANDS[args.command]
    if args.format == "dot" and args.command != "cactus":
        print("error: dot output is only available for the cactus command", file=sys.stderr)
        return EXIT_INPUT
    try:
        config.configure(precision=args.precision, seed=args.seed)
        report = run(args)
    except (ParseError, DegreeError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MomentProblemError, ArithmeticError, ValueError, IndexError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        config.configure(precision="double", seed=0)
    dot = report.pop("_dot", None)
    if args.format == "dot":
        body = dot
    elif args.format == "text":
        body = text(report) + "\n"
    else:
        body = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
