"""Command line front end.

Exit status is 0 on success, 1 when a check or reproduction fails and 2 on
usage, parse or validation errors.
"""
import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from gaspp.analysis2x2 import analyze, predict_outcome
from gaspp.config import load_config
from gaspp.equilibrium import enumerate_ne
from gaspp.errors import ConfigError
from gaspp.experiments import SUITES, reproduce_paper, run_experiment
from gaspp.game import BimatrixGame, classify, full_strategy
from gaspp.learners import StepSizes, nplayer_conditions, validate_conditions
from gaspp.registry import get_game

OK, FAILED, USAGE = 0, 1, 2


def _vec(x):
    return "(" + ", ".join(f"{v:.6g}" for v in x) + ")"


def _bimatrix(game, command):
    if not isinstance(game, BimatrixGame):
        raise ValueError(f"{command} needs a two-player game, got {game.players} players")
    return game


def cmd_run(args, out):
    cfg = load_config(args.config)
    if args.max_iters is not None:
        cfg = replace(cfg, max_iters=args.max_iters)
    if args.out_dir is not None:
        cfg = replace(cfg, output=Path(args.out_dir))
    res = run_experiment(cfg)
    s = res.summary
    out(f"{'converged' if s.converged else 'not converged'} ({s.stop_reason}) after {s.iterations} iterations")
    out(f"final strategies: {', '.join(_vec(full_strategy(x)) for x in s.final)}")
    out(f"exploitability: {s.exploitability:.3g}")
    out(f"artifacts: {res.directory}")
    return OK


def cmd_reproduce(args, out):
    report = reproduce_paper(args.suite, out_dir=args.out_dir, max_iters=args.max_iters)
    out(report.table())
    if args.suite == "fig5" and report.passed:
        out("non-convergence confirmed")
    return OK if report.passed else FAILED


def cmd_classify(args, out):
    game = get_game(args.game)
    if isinstance(game, BimatrixGame):
        out(str(classify(game)))
    else:
        out("General")
    return OK


def cmd_ne(args, out):
    game = _bimatrix(get_game(args.game), "ne")
    points = enumerate_ne(game)
    for a, b in points:
        out(f"row {_vec(full_strategy(a))}  column {_vec(full_strategy(b))}")
    if not points:
        out("no nondegenerate equilibrium found")
    return OK


def cmd_analyze2x2(args, out):
    game = _bimatrix(get_game(args.game), "analyze2x2")
    dyn = analyze(game, args.gamma)
    p = dyn.params
    out(f"u_r={p.u_r:g} b_r={p.b_r:g} u_c={p.u_c:g} b_c={p.b_c:g}")
    out(f"U = {np.array2string(dyn.U, precision=6)}")
    out("eigenvalues: " + ", ".join(f"{z:.6g}" for z in dyn.eigenvalues))
    out(f"center: {_vec(dyn.center) if dyn.center is not None else 'none'}")
    out(f"case: {dyn.case.value}")
    if args.initial is not None:
        pred = predict_outcome(dyn, tuple(args.initial))
        point = f" at {_vec(pred.point)}" if pred.point is not None else ""
        out(f"prediction: {pred.tag}{point}")
    return OK


def cmd_check_conditions(args, out):
    game = get_game(args.game)
    sizes = StepSizes(args.eta, args.gamma0)
    check = validate_conditions if isinstance(game, BimatrixGame) else nplayer_conditions
    report = check(game, sizes)
    for name, ok in (("condition1", report.condition1), ("condition2", report.condition2),
                     ("condition3", report.condition3)):
        out(f"{name}: {'ok' if ok else 'violated'}")
    out(f"4*gamma0^2*delta_r*delta_c = {report.prediction_product:.6g} (must be < 1)")
    out(f"step bound 1/(delta_r+delta_c) = {report.step_bound:.6g}")
    return OK if report.passed else FAILED


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=argparse.SUPPRESS,
                        help="output root (default $GASPP_OUT_DIR or ./gaspp_out)")
    common.add_argument("--max-iters", type=int, default=argparse.SUPPRESS,
                        help="override the iteration budget")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="print only errors")

    parser = argparse.ArgumentParser(prog="gaspp", parents=[common],
                                     description="Gradient learners with shrinking policy prediction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run an experiment config")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reproduce", parents=[common], help="replay a benchmark figure")
    p.add_argument("suite", choices=SUITES)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("classify", parents=[common], help="structural classes of a game")
    p.add_argument("game", help="registry name or JSON game file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("ne", parents=[common], help="enumerate Nash equilibria")
    p.add_argument("game")
    p.set_defaults(func=cmd_ne)

    p = sub.add_parser("analyze2x2", parents=[common], help="closed-form dynamics of a 2x2 game")
    p.add_argument("game")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--initial", type=float, nargs=2, metavar=("ALPHA", "BETA"),
                   help="initial strategies for the outcome prediction")
    p.set_defaults(func=cmd_analyze2x2)

    p = sub.add_parser("check-conditions", parents=[common], help="check step sizes for a game")
    p.add_argument("game")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--gamma0", type=float, required=True)
    p.set_defaults(func=cmd_check_conditions)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    for name, default in (("out_dir", None), ("max_iters", None), ("quiet", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s: %(message)s")

    def out(line):
        if not args.quiet:
            print(line)

    try:
        return args.func(args, out)
    except ConfigError as exc:
        where = ""
        if exc.line is not None:
            where = f" (line {exc.line}, column {exc.column})"
        elif exc.field is not None:
            where = f" (field {exc.field})"
        print(f"error: {exc}{where}", file=sys.stderr)
        return USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
