"""Command-line front end: ``run``, ``repl`` and ``suite``.

Exit codes: 0 when every check passed, 1 when some check failed,
2 for script errors (syntax, undefined names, invalid inputs).
"""

from __future__ import annotations

import argparse
import sys

from .errors import DeformError, UnknownSuite
from .sampling import DEFAULT_BOUNDS, Bounds
from .scalar import I_HBAR
from .script import Session, parse_line
from .suites import SUITES, run_suite

LAMBDAS = {"+ih": I_HBAR, "ih": I_HBAR, "-ih": -I_HBAR}


def cmd_run(args: argparse.Namespace) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sess = Session(out=sys.stdout)
    try:
        failures = sess.run(text)
    except DeformError as exc:
        sys.stdout.flush()
        print(f"{args.file}: {exc}", file=sys.stderr)
        return 2
    return 1 if failures else 0


def cmd_repl(args: argparse.Namespace) -> int:
    sess = Session(out=sys.stdout)
    prompt = "" if args.quiet or not sys.stdin.isatty() else "dg> "
    n = 0
    while True:
        try:
            line = input(prompt)
        except EOFError:
            break
        except KeyboardInterrupt:
            print()
            continue
        n += 1
        if line.strip() in ("quit", "exit"):
            break
        try:
            stmt = parse_line(line, n)
            if stmt is not None:
                sess.execute(stmt)
        except DeformError as exc:
            sys.stdout.flush()
            print(f"error: {exc}", file=sys.stderr)
    return 1 if sess.state.failures else 0


def cmd_suite(args: argparse.Namespace) -> int:
    names = list(SUITES) if args.name == "all" else [args.name]
    bounds = Bounds(
        args.max_terms if args.max_terms is not None else DEFAULT_BOUNDS.max_terms,
        args.max_word if args.max_word is not None else DEFAULT_BOUNDS.max_word,
        args.max_coeff if args.max_coeff is not None else DEFAULT_BOUNDS.max_coeff,
    )
    lam = LAMBDAS[args.lam] if args.lam else None
    status = 0
    for name in names:
        try:
            rep = run_suite(name, args.n, args.trials, args.seed, args.truncate, lam, args.signs, bounds)
        except UnknownSuite:
            print(f"error: unknown suite {name!r}; choose from: all, {', '.join(SUITES)}", file=sys.stderr)
            return 2
        print(rep.text(args.show), flush=True)
        if not rep.ok:
            status = 1
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dgdeform", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a script file")
    p.add_argument("file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("repl", help="read statements from stdin, one per line")
    p.add_argument("-q", "--quiet", action="store_true", help="no prompt")
    p.set_defaults(func=cmd_repl)

    p = sub.add_parser("suite", help="run a seeded identity suite")
    p.add_argument("name", help="suite name or 'all'")
    p.add_argument("--n", type=int, default=None, help="instance size (e.g. de Rham variables)")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truncate", type=int, default=None, help="h-order for star products")
    p.add_argument("--lambda", dest="lam", choices=sorted(LAMBDAS), default=None,
                   help="deformation parameter; default runs both signs where the suite allows")
    p.add_argument("--signs", choices=("verbatim", "cyclic"), default="verbatim",
                   help="sign convention of the DGLA primitive")
    p.add_argument("--max-terms", type=int, default=None)
    p.add_argument("--max-word", type=int, default=None)
    p.add_argument("--max-coeff", type=int, default=None)
    p.add_argument("--show", type=int, default=3, help="failures to print per suite")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
