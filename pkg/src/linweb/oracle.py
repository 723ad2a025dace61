"""Naive nondeterministic reference solver and differential checks.

``D0 & D1`` is read here as plain alternation: both sides are always tried,
in order, like two ordinary clauses. Everything else follows the same rules
as the committed-choice engine, but this module has its own search (nested
generators over persistent substitutions) and shares none of the engine's
backchaining code. On choice-free programs the two must agree answer for
answer; with choices, the engine's answers must be a subset of these.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, Sequence

from .builtins import InstantiationError, call_builtin
from .engine import Answer, LimitExceeded, Limits, canonical_answer, solve
from .formulas import (
    DAll,
    DAtom,
    DChoice,
    DFormula,
    DImp,
    GAnd,
    GAssume,
    GAtom,
    GExists,
    GFormula,
    GLoad,
    rename_fresh,
    subst_goal,
)
from .terms import Substitution, apply, fresh_var, unify_into

# nested generators cost several Python frames per proof level
DEFAULT_MAX_DEPTH = 150


class _Search:
    def __init__(self, program, registry, limits: Limits, occurs_check: bool):
        self.program = list(program)
        self.registry = registry
        self.max_steps = limits.max_steps
        self.max_depth = min(limits.max_depth or DEFAULT_MAX_DEPTH, DEFAULT_MAX_DEPTH)
        self.occurs_check = occurs_check
        self.steps = 0

    def prove(self, g: GFormula, s: Substitution, hyps: tuple, depth: int) -> Iterator[Substitution]:
        if depth > self.max_depth:
            raise LimitExceeded(f"oracle depth limit {self.max_depth} exceeded")
        if isinstance(g, GAtom):
            if g.builtin:
                s1 = call_builtin(g.atom, s, self.occurs_check)
                if s1 is not None:
                    yield s1
                return
            for d in hyps + tuple(self.program):
                self.steps += 1
                if self.max_steps is not None and self.steps > self.max_steps:
                    raise LimitExceeded(f"oracle step limit {self.max_steps} exceeded")
                yield from self.backchain(rename_fresh(d), g.atom, s, hyps, depth, ())
        elif isinstance(g, GAnd):
            for s1 in self.prove(g.left, s, hyps, depth):
                yield from self.prove(g.right, s1, hyps, depth)
        elif isinstance(g, GExists):
            yield from self.prove(subst_goal(g.body, {g.var.id: fresh_var()}), s, hyps, depth)
        elif isinstance(g, GAssume):
            yield from self.prove(g.body, s, (g.clause,) + hyps, depth)
        elif isinstance(g, GLoad):
            if self.registry is None:
                from .modules import ResolutionError

                raise ResolutionError(f"no module registry to resolve {g.url!r}")
            clauses = tuple(self.registry.load_module(g.url))
            yield from self.prove(g.body, s, clauses + hyps, depth)
        else:
            raise TypeError(f"not a goal: {g!r}")

    def backchain(self, d: DFormula, atom, s, hyps, depth, pending: tuple):
        if isinstance(d, DAtom):
            s1 = dict(s)
            if unify_into(d.atom, atom, s1, None, self.occurs_check):
                yield from self.prove_all(pending, s1, hyps, depth + 1)
        elif isinstance(d, DImp):
            yield from self.backchain(d.head, atom, s, hyps, depth, pending + (d.body,))
        elif isinstance(d, DChoice):
            yield from self.backchain(d.left, atom, s, hyps, depth, pending)
            yield from self.backchain(d.right, atom, s, hyps, depth, pending)
        elif isinstance(d, DAll):
            yield from self.backchain(rename_fresh(d), atom, s, hyps, depth, pending)
        else:
            raise TypeError(f"not a clause: {d!r}")

    def prove_all(self, goals: tuple, s, hyps, depth):
        if not goals:
            yield s
            return
        for s1 in self.prove(goals[0], s, hyps, depth):
            yield from self.prove_all(goals[1:], s1, hyps, depth)


def solve_nondet(
    program: Iterable[DFormula],
    goal: GFormula,
    limits: Optional[Limits] = None,
    registry=None,
    occurs_check: bool = True,
) -> List[Answer]:
    """All answers with every ``&`` treated as ordinary alternation."""
    search = _Search(program, registry, limits or Limits(), occurs_check)
    template = []
    mapping = {}
    while isinstance(goal, GExists):
        v = fresh_var()
        mapping[goal.var.id] = v
        template.append((goal.var.name, v))
        goal = goal.body
    goal = subst_goal(goal, mapping)
    answers: List[Answer] = []
    try:
        for s in search.prove(goal, {}, (), 0):
            answers.append({name: apply(s, v) for name, v in template if name != "_"})
    except RecursionError:
        raise LimitExceeded("oracle recursion limit exceeded", answers) from None
    except LimitExceeded as exc:
        exc.answers = answers
        raise
    return answers


@dataclass
class DiffReport:
    engine_answers: List[Answer] = field(default_factory=list)
    oracle_answers: List[Answer] = field(default_factory=list)
    subset_holds: Optional[bool] = None
    first_answer_matched: Optional[bool] = None
    conclusive: bool = True
    reason: str = ""

    def lines(self) -> List[str]:
        from .engine import format_answer

        out = [f"% engine answers: {len(self.engine_answers)}"]
        out += [f"%   {format_answer(a)}" for a in self.engine_answers]
        out.append(f"% oracle answers: {len(self.oracle_answers)}")
        out += [f"%   {format_answer(a)}" for a in self.oracle_answers]
        if not self.conclusive:
            out.append(f"% inconclusive: {self.reason}")
        else:
            out.append(f"% subset holds: {str(self.subset_holds).lower()}")
            out.append(f"% first answer matched: {str(self.first_answer_matched).lower()}")
        return out


def differential_check(
    program: Sequence[DFormula],
    goal: GFormula,
    limits: Optional[Limits] = None,
    registry=None,
    occurs_check: bool = True,
) -> DiffReport:
    """Run both solvers to exhaustion and compare answer sets.

    The oracle runs first: its search tree contains the engine's, so when it
    cannot finish the engine is not run at all and the report is inconclusive.
    """
    report = DiffReport()
    try:
        report.oracle_answers = solve_nondet(program, goal, limits, registry, occurs_check)
    except (LimitExceeded, InstantiationError) as exc:
        report.oracle_answers = getattr(exc, "answers", [])
        report.conclusive, report.reason = False, f"oracle: {exc}"
        return report
    try:
        report.engine_answers, _ = solve(
            program, goal, "all", limits, registry=registry, occurs_check=occurs_check
        )
    except (LimitExceeded, InstantiationError) as exc:
        report.engine_answers = getattr(exc, "answers", [])
        report.conclusive, report.reason = False, f"engine: {exc}"
        return report
    oracle = {canonical_answer(a) for a in report.oracle_answers}
    engine = [canonical_answer(a) for a in report.engine_answers]
    report.subset_holds = all(a in oracle for a in engine)
    report.first_answer_matched = bool(engine) and engine[0] in oracle
    return report
