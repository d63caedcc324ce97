"""``mb`` command line: simplify, eval, analyze, verify, derive-b2.

Exit codes: 0 ok, 1 usage, 2 parse/no-match, 3 divergence or numeric failure.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
import warnings

from . import analysis, campaign, lemmas, numerics
from .errors import (DivergenceError, MBError, NoMatch, ParseError, ShapeMismatch,
                     UnassignedSymbolError)
from .symexpr import ClosedForm, MBIntegrand, canonicalize, parse, render

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERIC = 0, 1, 2, 3

_ASSIGN_RE = re.compile(r"([A-Za-z][A-Za-z0-9_]*)=(\S+)\Z")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def default_tol() -> float:
    return float(os.environ.get("MB_TOL", "1e-8"))


def parse_assignment(items) -> dict:
    out = {}
    for item in items or ():
        m = _ASSIGN_RE.match(item.replace(" ", ""))
        value = m.group(2) if m else ""
        try:
            if "j" in value.lower() or "i" in value[:-1]:
                raise ValueError
            out[m.group(1)] = complex(value[:-1] + "j" if value.endswith("i") else value)
        except ValueError:
            raise ValueError(f"bad --assign value {item!r}; expected name=RE[(+|-)IMi]") from None
    return out


def format_complex(w: complex) -> str:
    re_, im = round(w.real, 10) + 0.0, round(w.imag, 10) + 0.0
    return f"{re_:.10f}{im:+.10f}i"


def _integrand(text: str) -> MBIntegrand:
    value = parse(text)
    if not isinstance(value, MBIntegrand):
        raise ParseError("expected an MB[var; ...] integrand")
    return value


def cmd_simplify(args) -> int:
    f = _integrand(args.expr)
    res = lemmas.simplify(f)
    print(res.render())
    return EXIT_OK


def cmd_derive_b2(args) -> int:
    f = _integrand(args.expr)
    derived = lemmas.derive_barnes2_via_barnes1(f)
    direct = lemmas.match_barnes2(f)
    for i, step in enumerate(derived.steps, 1):
        print(f"step {i}: {step}")
    print(f"derived: {render(derived.closed)}")
    print(f"barnes2: {render(direct.closed)}")
    same = derived.closed == canonicalize(direct.closed)
    print(f"equal: {'yes' if same else 'no'}")
    return EXIT_OK if same else EXIT_NUMERIC


def _report_lines(f: MBIntegrand, a: dict, x0):
    st = analysis.strip(f, a)
    lines = []
    if st.nonempty:
        lines.append(f"strip: ({st.lower:.6g}, {st.upper:.6g})")
    else:
        lines.append(st.describe_failure())
    if x0 is None:
        if not st.nonempty:
            return lines, None
        x0 = st.midpoint
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = analysis.analyze_convergence(f, a, x0)
    lines.append(f"x0: {x0:.6g}")
    lines.append(f"up: {rep.describe(1)}")
    lines.append(f"down: {rep.describe(-1)}")
    if (rep.verdict_up is rep.verdict_down is analysis.Verdict.EXPONENTIAL):
        lines.append("exponential decay both directions")
    if rep.heuristic:
        lines.append("note: unequal numbers of +z and -z gammas; exponent is heuristic")
    return lines, rep


def cmd_analyze(args) -> int:
    f = _integrand(args.expr)
    a = parse_assignment(args.assign)
    lines, _ = _report_lines(f, a, args.x0)
    print("\n".join(lines))
    return EXIT_OK


def cmd_eval(args) -> int:
    value = parse(args.expr)
    a = parse_assignment(args.assign)
    tol = args.tol if args.tol is not None else default_tol()
    if isinstance(value, ClosedForm):
        print(format_complex(numerics.eval_closed(value, a)))
        return EXIT_OK
    try:
        q = numerics.contour_quadrature(value, a, args.x0, tol)
    except DivergenceError as exc:
        lines, _ = _report_lines(value, a, args.x0)
        print("\n".join(lines), file=sys.stderr)
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERIC
    print(format_complex(q.value))
    return EXIT_OK


def cmd_verify(args) -> int:
    tol = args.tol if args.tol is not None else default_tol()
    cfg = campaign.CampaignConfig(rule=args.rule, samples=args.samples, seed=args.seed,
                                  tol=tol, jobs=args.jobs)
    if args.out:
        with open(args.out, "w") as fh:
            _, summary = campaign.run_campaign(cfg, fh)
    else:
        _, summary = campaign.run_campaign(cfg, sys.stdout)
    print(f"{summary['rule']}: {summary['pass']}/{summary['samples']} pass, "
          f"max rel err {summary['maxRelErr']:.3g}", file=sys.stderr)
    return EXIT_OK if summary["fail"] == 0 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mb", description="Mellin-Barnes integral simplifier and verifier")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def expr_cmd(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("expr")
        sp.set_defaults(func=func)
        return sp

    expr_cmd("simplify", cmd_simplify, "rewrite an MB integrand in closed form")
    expr_cmd("derive-b2", cmd_derive_b2, "second Barnes lemma via the first, step by step")
    for name, func, help_ in (("eval", cmd_eval, "evaluate numerically"),
                              ("analyze", cmd_analyze, "contour strip and convergence")):
        sp = expr_cmd(name, func, help_)
        sp.add_argument("--assign", action="append", metavar="NAME=RE[+IMi]")
        sp.add_argument("--x0", type=float, default=None)
        if name == "eval":
            sp.add_argument("--tol", type=float, default=None)

    sp = sub.add_parser("verify", help="randomised closed form vs quadrature campaign")
    sp.add_argument("--rule", default="Barnes1",
                    choices=[r.value for r in lemmas.Rule] + [r.value.lower() for r in lemmas.Rule])
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, NoMatch, ShapeMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, UnassignedSymbolError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MBError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
