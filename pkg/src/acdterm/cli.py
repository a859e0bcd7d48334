"""Command line interface.

    acdterm run -p FILE (-g TERM | -G FILE) [--max-steps N] [--trace]
                [--trace-out FILE] [--print-ids] [--format text|json-lines]
    acdterm check -p FILE
    acdterm oracle -p FILE (-g TERM | -G FILE) [--depth N] [--width N]

Exit codes: 0 normal form reached (or check passed), 2 step budget exhausted,
1 parse or usage error. The final goal is printed to stdout; the trace goes
to stderr or to --trace-out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import oracle as oracle_mod
from .engine import BUDGET_EXHAUSTED, format_step, run, step_record
from .parser import ParseError, parse_program, parse_term
from .pretty import pretty
from .terms import canonical, strip

DEFAULT_MAX_STEPS = 10_000


def _load_program(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise SystemExit(f"acdterm: cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_program(source)
    except ParseError as exc:
        raise SystemExit(f"{path}:{exc}") from exc


def _load_goal(args):
    if args.goal is not None:
        source, origin = args.goal, "<goal>"
    else:
        try:
            with open(args.goal_file, encoding="utf-8") as fh:
                source = fh.read()
        except OSError as exc:
            raise SystemExit(f"acdterm: cannot read {args.goal_file}: {exc.strerror}")
        origin = args.goal_file
    try:
        return parse_term(source)
    except ParseError as exc:
        raise SystemExit(f"{origin}:{exc}") from exc


def _default_max_steps() -> int:
    env = os.environ.get("ACDTERM_MAX_STEPS")
    if env is not None:
        try:
            value = int(env)
            if value > 0:
                return value
        except ValueError:
            pass
        print(f"acdterm: ignoring invalid ACDTERM_MAX_STEPS={env!r}", file=sys.stderr)
    return DEFAULT_MAX_STEPS


def _add_goal_options(sub):
    sub.add_argument("-p", "--program", required=True, metavar="FILE")
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("-g", "--goal", metavar="TERM")
    group.add_argument("-G", "--goal-file", metavar="FILE")


def _cmd_run(args) -> int:
    program = _load_program(args.program)
    goal = _load_goal(args)
    result = run(program, goal, max_steps=args.max_steps)
    if args.trace or args.trace_out:
        if args.trace_out:
            out = open(args.trace_out, "w", encoding="utf-8")
        else:
            out = sys.stderr
        try:
            for ts in result.trace:
                if args.format == "json-lines":
                    print(json.dumps(step_record(ts)), file=out)
                else:
                    print(format_step(ts), file=out)
        finally:
            if args.trace_out:
                out.close()
    final = canonical(strip(result.final.goal))
    if args.print_ids:
        print(pretty(result.final.goal, print_ids=True))
    else:
        print(pretty(final))
    return 2 if result.status == BUDGET_EXHAUSTED else 0


def _cmd_check(args) -> int:
    program = _load_program(args.program)
    print(f"{args.program}: {len(program)} rules ok")
    return 0


def _cmd_oracle(args) -> int:
    program = _load_program(args.program)
    goal = _load_goal(args)
    try:
        result = oracle_mod.search_normal_forms(
            program, goal, depth=args.depth, width=args.width
        )
    except oracle_mod.OracleSizeError as exc:
        raise SystemExit(f"acdterm: oracle refused: {exc}")
    for nf in sorted(pretty(t) for t in result.normal_forms):
        print(nf)
    print(
        f"% explored {result.explored} states, truncated={str(result.truncated).lower()}",
        file=sys.stderr,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="acdterm",
        description="AC term rewriting with conjunctive-context and propagation rules",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="rewrite a goal to normal form")
    _add_goal_options(p_run)
    p_run.add_argument("--max-steps", type=int, default=None, metavar="N")
    p_run.add_argument("--trace", action="store_true")
    p_run.add_argument("--trace-out", metavar="FILE")
    p_run.add_argument("--print-ids", action="store_true")
    p_run.add_argument("--format", choices=["text", "json-lines"], default="text")
    p_run.set_defaults(fn=_cmd_run)

    p_check = sub.add_parser("check", help="parse and validate a program")
    p_check.add_argument("-p", "--program", required=True, metavar="FILE")
    p_check.set_defaults(fn=_cmd_check)

    p_oracle = sub.add_parser("oracle", help="exhaustive normal-form search (debugging)")
    _add_goal_options(p_oracle)
    p_oracle.add_argument("--depth", type=int, default=20)
    p_oracle.add_argument("--width", type=int, default=10_000)
    p_oracle.set_defaults(fn=_cmd_oracle)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "max_steps", None) is None and args.command == "run":
        args.max_steps = _default_max_steps()
    if args.command == "run" and args.max_steps <= 0:
        print("acdterm: --max-steps must be positive", file=sys.stderr)
        return 1
    try:
        return args.fn(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
