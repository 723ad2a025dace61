"""Command-line front end: batch queries and an interactive top level."""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, TextIO, Tuple

from .builtins import InstantiationError
from .engine import LimitExceeded, Limits, Solver, StatCounters, format_answer
from .formulas import DFormula
from .modules import ModuleError, ModuleRegistry, read_map_file
from .oracle import differential_check
from .syntax import ParseError, parse_goal, parse_program

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_ORACLE = 0, 1, 2, 3

ERRORS = (ParseError, ModuleError, InstantiationError, LimitExceeded, OSError, ValueError)


@dataclass
class SessionConfig:
    files: List[str] = field(default_factory=list)
    mode: str = "first"
    limits: Limits = field(default_factory=Limits)
    trace: bool = False
    stats: bool = False
    oracle: bool = False
    occurs_check: bool = True
    strict_commit: bool = False
    mappings: List[Tuple[str, str]] = field(default_factory=list)


def consult(paths) -> List[DFormula]:
    clauses: List[DFormula] = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            clauses.extend(parse_program(text).clauses)
        except ParseError as exc:
            raise ParseError(f"{path}: {exc.message}", exc.line, exc.column, exc.expected) from None
    return clauses


def format_stats(st: StatCounters) -> str:
    return (
        f"% inferences: {st.inferences}, commits: {st.choice_commits}, "
        f"prunes: {st.choice_prunes}, hypotheses: {st.hypotheses_pushed}"
    )


class Session:
    def __init__(self, config: SessionConfig, out: TextIO, err: TextIO):
        self.config = config
        self.out = out
        self.err = err
        self.program = consult(config.files)
        self.registry = ModuleRegistry(config.mappings)
        self.last_stats = StatCounters()

    def solver(self, trace_stream: TextIO) -> Solver:
        tracer = None
        if self.config.trace:
            tracer = lambda ev: print(ev, file=trace_stream)  # noqa: E731
        return Solver(
            self.program,
            registry=self.registry,
            occurs_check=self.config.occurs_check,
            strict_commit=self.config.strict_commit,
            limits=self.config.limits,
            tracer=tracer,
        )


def run_batch(config: SessionConfig, query: str, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        session = Session(config, out, err)
        goal = parse_goal(query)
    except ERRORS as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR
    solver = session.solver(err)
    count = 0
    status = None
    answers = solver.solve(goal)
    try:
        for ans in answers:
            count += 1
            print(format_answer(ans), file=out)
            if config.mode == "first":
                break
        else:
            if count:
                print("no more answers", file=out)
    except ERRORS as exc:
        print(f"error: {exc}", file=err)
        status = EXIT_ERROR
    finally:
        answers.close()
    if not count and status is None:
        print("false", file=out)
    if config.stats:
        print(format_stats(solver.stats), file=out)
    if status is None:
        status = EXIT_OK if count else EXIT_FAIL
    if config.oracle:
        try:
            report = differential_check(
                session.program,
                goal,
                config.limits,
                registry=session.registry,
                occurs_check=config.occurs_check,
            )
        except ERRORS as exc:
            print(f"error: {exc}", file=err)
            return EXIT_ERROR
        for line in report.lines():
            print(line, file=out)
        if report.conclusive and not report.subset_holds:
            return EXIT_ORACLE
    return status


HELP = """\
Enter a goal terminated by '.', e.g.  ?- max(9,3,M).
After an answer, type ';' for the next one or just press return.
Directives: :load <file>  :trace on|off  :stats  :quit
"""


def repl(config: SessionConfig, inp: TextIO = None, out: TextIO = None, err: TextIO = None) -> int:
    inp = inp or sys.stdin
    out = out or sys.stdout
    err = err or sys.stderr
    session = Session(config, out, err)
    interactive = inp.isatty() if hasattr(inp, "isatty") else False
    pending: List[str] = []

    def prompt(text: str) -> Optional[str]:
        if pending:
            return pending.pop()
        if interactive:
            out.write(text)
            out.flush()
        line = inp.readline()
        return line if line else None

    def push_back(line: str) -> None:
        pending.append(line)

    if interactive:
        out.write(HELP)
    buf = ""
    while True:
        line = prompt("?- " if not buf else "|  ")
        if line is None:
            return EXIT_OK
        stripped = line.strip()
        if not buf and stripped.startswith(":"):
            if directive(session, stripped):
                return EXIT_OK
            continue
        buf += line
        text = buf.strip()
        if not text:
            buf = ""
            continue
        if not text.endswith("."):
            continue
        buf = ""
        if text.startswith("?-"):
            text = text[2:]
        run_query(session, text, prompt, push_back)


def directive(session: Session, line: str) -> bool:
    """Handle a ':' directive; True means quit."""
    cmd, _, arg = line[1:].partition(" ")
    arg = arg.strip()
    out, err = session.out, session.err
    if cmd in ("quit", "q", "halt"):
        return True
    if cmd == "load":
        try:
            clauses = consult([arg])
        except ERRORS as exc:
            print(f"error: {exc}", file=err)
        else:
            session.program.extend(clauses)
            print(f"% loaded {len(clauses)} clause(s) from {arg}", file=out)
    elif cmd == "trace" and arg in ("on", "off"):
        session.config.trace = arg == "on"
        print(f"% trace {arg}", file=out)
    elif cmd == "stats":
        print(format_stats(session.last_stats), file=out)
    elif cmd == "help":
        out.write(HELP)
    else:
        print(f"error: unknown directive {line!r}", file=err)
    return False


def run_query(session: Session, text: str, prompt, push_back) -> None:
    out, err = session.out, session.err
    try:
        goal = parse_goal(text)
    except ParseError as exc:
        print(f"error: {exc}", file=err)
        return
    solver = session.solver(out)
    answers = solver.solve(goal)
    found = 0
    try:
        for ans in answers:
            found += 1
            print(format_answer(ans), file=out)
            reply = prompt(" ? ")
            if reply is None or reply.strip() != ";":
                # anything but ';' ends the query; a non-blank line is new input
                if reply is not None and reply.strip():
                    push_back(reply)
                break
        else:
            print("no more answers" if found else "false", file=out)
    except ERRORS as exc:
        print(f"error: {exc}", file=err)
    finally:
        answers.close()
        session.last_stats = solver.stats.snapshot()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="linweb",
        description="Horn clauses with committed-choice '&' clauses and url-addressed modules.",
    )
    p.add_argument("-c", "--consult", action="append", default=[], metavar="FILE",
                   help="load a program file (repeatable)")
    p.add_argument("-q", "--query", metavar="GOAL", help="run GOAL and exit; without it, start the REPL")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--all", dest="mode", action="store_const", const="all", help="print every answer")
    mode.add_argument("--first", dest="mode", action="store_const", const="first",
                      help="print the first answer only (default)")
    p.add_argument("--trace", action="store_true", help="print CALL/EXIT/FAIL/TRY/COMMIT/PRUNE/PUSH/POP events")
    p.add_argument("--stats", action="store_true", help="print inference and commit counters")
    p.add_argument("--oracle", action="store_true", help="also run the nondeterministic reference solver")
    p.add_argument("--strict-commit", action="store_true",
                   help="after a choice commits, discard remaining solutions of the chosen side too")
    p.add_argument("--no-occurs-check", dest="occurs_check", action="store_false",
                   help="unify without the occurs check (unsound)")
    p.add_argument("--map", action="append", default=[], metavar="URL=PATH",
                   help="resolve module URL to a local file or base url (repeatable)")
    p.add_argument("--map-file", metavar="FILE", help="file of url<TAB>path lines")
    p.add_argument("--max-steps", type=int, default=Limits().max_steps, metavar="N")
    p.add_argument("--max-depth", type=int, default=None, metavar="N")
    p.set_defaults(mode="first")
    return p


def config_from_args(args: argparse.Namespace) -> SessionConfig:
    mappings = []
    if args.map_file:
        mappings.extend(read_map_file(args.map_file))
    for item in args.map:
        url, sep, loc = item.partition("=")
        if not sep or not url or not loc:
            raise ValueError(f"--map expects URL=PATH, got {item!r}")
        mappings.append((url, loc))
    for path in args.consult:
        if not os.path.exists(path):
            raise ValueError(f"no such file: {path}")
    return SessionConfig(
        files=list(args.consult),
        mode=args.mode,
        limits=Limits(args.max_steps, args.max_depth),
        trace=args.trace,
        stats=args.stats,
        oracle=args.oracle,
        occurs_check=args.occurs_check,
        strict_commit=args.strict_commit,
        mappings=mappings,
    )


def main(argv=None, stdin: TextIO = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    if args.query is not None:
        return run_batch(config, args.query, stdout, stderr)
    try:
        return repl(config, stdin, stdout, stderr)
    except ERRORS as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
