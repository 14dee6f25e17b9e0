"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 verification deviation beyond tolerance.
JSON outputs carry ``"schema": 1``; numbers are written with 9 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import numpy as np

from . import analysis, closed_form, core, glf_solver, oracle

SCHEMA = 1
OUTDIR_ENV = "LOTTO_PREALLOC_OUTDIR"
DEFAULT_LEVELS = (0.25, 0.5, 0.625, 0.75, 0.875)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def num(x) -> float:
    """Round to 9 significant digits for output."""
    return float(f"{float(x):.9g}")


def _floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _opponent(args) -> tuple[float, float]:
    """(q, R_B) from either --qRB or --q/--RB."""
    if args.qRB is not None:
        if args.RB is not None or args.q_given:
            raise UsageError("--qRB: cannot be combined with --q/--RB")
        return 1.0, args.qRB
    if args.RB is None:
        raise UsageError("--RB: required (or give --qRB)")
    return args.q, args.RB


def _add_opponent(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=float, default=None, help="effectiveness of B's resources (default 1)")
    p.add_argument("--RB", type=float, default=None, help="B's real-time budget")
    p.add_argument("--qRB", type=float, default=None, help="product q*R_B (sets q=1)")


def _add_instance(p: argparse.ArgumentParser, need_P: bool = True) -> None:
    p.add_argument("--w", type=_floats, required=True, help="battlefield values, comma separated")
    p.add_argument("--P", type=float, default=None if not need_P else 0.0, help="pre-allocated budget")
    p.add_argument("--RA", type=float, required=True, help="A's real-time budget")
    _add_opponent(p)


def _add_output(p: argparse.ArgumentParser, default_fmt: str) -> None:
    p.add_argument("--format", choices=("json", "csv"), default=default_fmt)
    p.add_argument("--out", default=None, help=f"output file (relative paths go under ${OUTDIR_ENV} if set)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lotto-prealloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("payoff", help="equilibrium value under the optimal pre-allocation")
    _add_instance(p)
    _add_output(p, "json")

    p = sub.add_parser("solve", help="stage-2 solution for an explicit pre-allocation")
    _add_instance(p, need_P=False)
    p.add_argument("--p", default="proportional", help="pre-allocation vector or 'proportional'")
    _add_output(p, "json")

    p = sub.add_parser("level-curve", help="samples of the (P, R_A) pairs reaching a value level")
    p.add_argument("--Pi", type=float, required=True)
    p.add_argument("--W", type=float, default=1.0)
    p.add_argument("--points", type=int, default=101)
    _add_opponent(p)
    _add_output(p, "csv")

    p = sub.add_parser("surface", help="grid of equilibrium values over (P, R_A)")
    p.add_argument("--W", type=float, default=1.0)
    p.add_argument("--P-max", dest="P_max", type=float, default=4.0)
    p.add_argument("--RA-max", dest="RA_max", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=41)
    _add_opponent(p)
    _add_output(p, "csv")

    p = sub.add_parser("effectiveness", help="pre-allocated budget equivalent to real-time resources")
    p.add_argument("--Pi", type=_floats, default=None, help="value levels (default: the five plotted levels)")
    p.add_argument("--RA", type=_floats, default=None, help="real-time budgets instead of levels")
    p.add_argument("--W", type=float, default=1.0)
    _add_opponent(p)
    _add_output(p, "csv")

    p = sub.add_parser("invest", help="optimal split of a monetary budget")
    p.add_argument("--XA", type=float, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--W", type=float, default=1.0)
    p.add_argument("--points", type=int, default=51, help="samples of the tangent level curve")
    _add_opponent(p)
    _add_output(p, "json")

    p = sub.add_parser("verify", help="certify the exact value against the grid oracle")
    _add_instance(p, need_P=False)
    p.add_argument("--p", default="proportional")
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--epsilon", type=float, default=None, help="gap target (default 0.005 W)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=None, help="allowed deviation (default 0.02 W)")
    p.add_argument("--tie-rule", dest="tie_rule", choices=("split", "B", "A"), default="split")
    _add_output(p, "json")
    return parser


def _instance_and_p(args) -> tuple[core.GameInstance, core.PreAllocation]:
    q, R_B = _opponent(args)
    spec = getattr(args, "p", "proportional")
    if spec == "proportional":
        P = 0.0 if args.P is None else args.P
        inst = core.validate_instance(args.w, q, P, args.RA, R_B)
        return inst, core.proportional_preallocation(inst)
    try:
        p_vec = _floats(spec)
    except argparse.ArgumentTypeError as err:
        raise UsageError(f"--p: {err}")
    P = sum(p_vec) if args.P is None else args.P
    inst = core.validate_instance(args.w, q, P, args.RA, R_B)
    return inst, core.make_preallocation(inst, p_vec)


def cmd_payoff(args) -> dict:
    q, R_B = _opponent(args)
    inst = core.validate_instance(args.w, q, args.P, args.RA, R_B)
    regime = closed_form.classify_regime(inst)
    pay = closed_form.payoff_A(inst)
    out = {"input": inst.to_dict(), "payoff_A": num(pay.value_A), "payoff_B": num(pay.value_B),
           "regime": regime.payoff_branch.value, "boundary": regime.tag is closed_form.RegimeTag.BOUNDARY,
           "tau": None if regime.tau is None else num(regime.tau)}
    if inst.R_A > 0:
        kappa, _ = closed_form.kappa_closed_form(inst)
        out["kappa_A"] = num(kappa.kappa_A)
        out["kappa_B"] = num(kappa.kappa_B)
    return out


def cmd_solve(args) -> dict:
    inst, p = _instance_and_p(args)
    eq = glf_solver.solve_glf(inst, p)
    return {"input": {**inst.to_dict(), "p": [num(x) for x in p.p]},
            "payoff_A": num(eq.payoff.value_A), "payoff_B": num(eq.payoff.value_B),
            "kappa_A": num(eq.kappa.kappa_A), "kappa_B": num(eq.kappa.kappa_B),
            "B1": sorted(eq.partition.B1), "B2": sorted(eq.partition.B2),
            "conceded": sorted(eq.partition.conceded),
            "residual_A": num(eq.residual_A), "residual_B": num(eq.residual_B),
            "optimal_payoff_A": num(closed_form.payoff_A(inst).value_A)}


def cmd_level_curve(args) -> dict:
    q, R_B = _opponent(args)
    pts = analysis.level_curve(args.Pi, R_B, q, args.W, args.points)
    return {"input": {"Pi": args.Pi, "q": q, "R_B": R_B, "W": args.W, "points": args.points},
            "columns": ["Pi", "P", "R_A", "branch"],
            "rows": [[num(pt.Pi), num(pt.P), num(pt.R_A), pt.branch.value] for pt in pts]}


def cmd_surface(args) -> dict:
    q, R_B = _opponent(args)
    if args.steps < 2:
        raise UsageError("--steps: must be >= 2")
    if args.P_max < 0 or args.RA_max < 0:
        raise core.NegativeBudget("P-max/RA-max: must be >= 0")
    rows = []
    for P in np.linspace(0.0, args.P_max, args.steps):
        for R_A in np.linspace(0.0, args.RA_max, args.steps):
            rows.append([num(P), num(R_A), num(analysis.investment_payoff(P, R_A, R_B, q, args.W))])
    return {"input": {"q": q, "R_B": R_B, "W": args.W, "P_max": args.P_max,
                      "RA_max": args.RA_max, "steps": args.steps},
            "columns": ["P", "R_A", "payoff"], "rows": rows}


def cmd_effectiveness(args) -> dict:
    q, R_B = _opponent(args)
    if args.Pi is not None and args.RA is not None:
        raise UsageError("--Pi/--RA: give one or the other")
    rows = []
    if args.RA is not None:
        budgets = args.RA
    else:
        levels = list(DEFAULT_LEVELS) if args.Pi is None else args.Pi
        budgets = []
        for Pi in levels:
            if Pi <= 0:
                raise analysis.InvalidLevel(f"Pi={Pi}: effectiveness needs a positive level")
            budgets.append(analysis.level_RA(Pi, 0.0, R_B, q, args.W).R_A)
    for R_A in budgets:
        P_bar = analysis.effectiveness_equivalent_P(R_A, R_B, q)
        value = analysis.investment_payoff(0.0, R_A, R_B, q, args.W)
        rows.append([num(value), num(R_A), num(P_bar), num(P_bar / R_A)])
    return {"input": {"q": q, "R_B": R_B, "W": args.W, "Pi": args.Pi, "RA": args.RA},
            "columns": ["Pi", "R_A", "P_bar", "ratio"], "rows": rows}


def cmd_invest(args) -> dict:
    q, R_B = _opponent(args)
    inv = analysis.optimal_investment(args.XA, args.c, R_B, q, args.W)
    curve = []
    if inv.payoff < args.W:
        curve = [[num(pt.P), num(pt.R_A)]
                 for pt in analysis.level_curve(inv.payoff, R_B, q, args.W, args.points)]
    return {"input": {"X_A": args.XA, "c": args.c, "q": q, "R_B": R_B, "W": args.W},
            "P_star": num(inv.P_star), "R_A_star": num(inv.R_A_star), "payoff": num(inv.payoff),
            "t": num(inv.t), "interval": None if inv.interval is None else [num(x) for x in inv.interval],
            "segment": [[0.0, num(args.XA)], [num(args.XA / args.c), 0.0]],
            "tangent_level": num(inv.payoff), "level_curve": curve}


def cmd_verify(args) -> tuple[dict, int]:
    inst, p = _instance_and_p(args)
    game = oracle.build_discretized(inst, p, args.delta, tie_rule=args.tie_rule)
    cert = oracle.solve_saddle(game, args.epsilon, args.max_iters, args.seed)
    exact = glf_solver.solve_glf(inst, p).payoff.value_A
    tol = 0.02 * inst.W if args.tol is None else args.tol
    deviation = abs(cert.value - exact)
    ok = deviation <= tol and cert.converged
    out = {"input": {**inst.to_dict(), "p": [num(x) for x in p.p], "delta": args.delta,
                     "epsilon": args.epsilon, "seed": args.seed, "tie_rule": args.tie_rule},
           "exact_payoff_A": num(exact), "oracle_value": num(cert.value), "gap": num(cert.gap),
           "best_response_A": num(cert.best_response_A), "best_response_B": num(cert.best_response_B),
           "iterations": cert.iterations, "converged": cert.converged,
           "grid": [game.levels_A, game.levels_B],
           "deviation": num(deviation), "tolerance": num(tol), "passed": ok}
    return out, 0 if ok else 2


COMMANDS = {
    "payoff": cmd_payoff, "solve": cmd_solve, "level-curve": cmd_level_curve,
    "surface": cmd_surface, "effectiveness": cmd_effectiveness, "invest": cmd_invest,
    "verify": cmd_verify,
}


def render(result: dict, fmt: str) -> str:
    if fmt == "csv":
        if "rows" not in result:
            raise UsageError("--format: csv is only available for tabular commands")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(result["columns"])
        writer.writerows(result["rows"])
        return buf.getvalue()
    return json.dumps(result, sort_keys=False) + "\n"


def _resolve_out(path: str) -> str:
    base = os.environ.get(OUTDIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.q_given = getattr(args, "q", None) is not None
        if hasattr(args, "q") and args.q is None:
            args.q = 1.0
        outcome = COMMANDS[args.command](args)
        result, code = outcome if isinstance(outcome, tuple) else (outcome, 0)
        result = {"schema": SCHEMA, "command": args.command, **result}
        text = render(result, args.format)
    except UsageError as err:
        print(f"usage error: {err}", file=stderr)
        return 1
    except core.LottoError as err:
        print(f"{type(err).__name__}: {err}", file=stderr)
        return 1
    if args.out:
        with open(_resolve_out(args.out), "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
