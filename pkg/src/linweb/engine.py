"""Proof search with committed choice.

The solver is an explicit machine: a continuation (linked list of frames), a
stack of choicepoints and a trail that records variable bindings and changes
to the hypothetical context so both can be undone on backtracking.

Goal reduction handles ``,``, existentials, ``D => G``, ``"url" => G`` and
atomic goals; an atomic goal selects candidate clauses (hypotheses, most
recent first, then program clauses in source order) and backchains on each.
Backchaining walks down a clause to its head, unifies, then runs the bodies
met on the way, outermost first.

A ``D0 & D1`` met during backchaining pushes a choicepoint for ``D1`` and
continues into ``D0``. A commit frame placed after ``D0``'s bodies fires on
the first success of ``D0``: from then on the ``D1`` choicepoint is dead and
is dropped without being explored when backtracking reaches it. Further
solutions from inside ``D0`` remain reachable unless ``strict_commit`` is
set, in which case every choicepoint created since the choice is discarded
as well.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .builtins import COMPARISONS, InstantiationError, compare, distinct
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
    head_keys,
    instantiate,
    quantified,
    subst_goal,
)
from .syntax import pretty_clause, pretty_goal, pretty_term
from .terms import Term, Var, apply, fresh_var, key, unify_into, variables, walk

Answer = Dict[str, Term]

__all__ = [
    "Answer",
    "InstantiationError",
    "LimitExceeded",
    "Limits",
    "Solver",
    "StatCounters",
    "TraceEvent",
    "canonical_answer",
    "format_answer",
    "solve",
]


@dataclass(frozen=True)
class Limits:
    max_steps: Optional[int] = 1_000_000
    max_depth: Optional[int] = None

    def __post_init__(self):
        for v in (self.max_steps, self.max_depth):
            if v is not None and v <= 0:
                raise ValueError("limits must be positive")


@dataclass
class StatCounters:
    inferences: int = 0
    choice_commits: int = 0
    choice_prunes: int = 0
    hypotheses_pushed: int = 0

    def snapshot(self) -> "StatCounters":
        return replace(self)


class LimitExceeded(Exception):
    """A step or depth bound was hit; distinct from finite failure."""

    def __init__(self, message: str, answers: Sequence[Answer] = (), stats=None):
        super().__init__(message)
        self.answers = list(answers)
        self.stats = stats


@dataclass(frozen=True)
class TraceEvent:
    kind: str  # CALL EXIT FAIL TRY COMMIT PRUNE PUSH POP
    depth: int
    subject: str

    def __str__(self):
        return f"{self.kind} {self.depth} {self.subject}"


class _Hyp:
    __slots__ = ("clause", "keys", "prev", "size")

    def __init__(self, clause, prev):
        self.clause = clause
        self.keys = head_keys(clause)
        self.prev = prev
        self.size = 1 + (prev.size if prev else 0)


class _Choice:
    """One activation of a ``&`` node."""

    __slots__ = ("id", "left", "right", "side", "committed", "height")

    def __init__(self, id, left, right, height):
        self.id = id
        self.left = left
        self.right = right
        self.side = 0
        self.committed = False
        self.height = height


class _ClauseCP:
    __slots__ = ("mark", "atom", "depth", "cands", "idx", "cont")

    def __init__(self, mark, atom, depth, cands, cont):
        self.mark = mark
        self.atom = atom
        self.depth = depth
        self.cands = cands
        self.idx = 0
        self.cont = cont


class _AltCP:
    __slots__ = ("mark", "rec", "atom", "bodies", "recs", "cont", "depth")

    def __init__(self, mark, rec, atom, bodies, recs, cont, depth):
        self.mark = mark
        self.rec = rec
        self.atom = atom
        self.bodies = bodies
        self.recs = recs
        self.cont = cont
        self.depth = depth


_GOAL, _EXIT, _POP, _COMMIT = range(4)


class Solver:
    """Committed-choice solver over a fixed program.

    ``solve`` may be called repeatedly; each call resets the counters. A
    solver is single-threaded; the program list may be shared.
    """

    def __init__(
        self,
        program: Iterable[DFormula] = (),
        *,
        registry=None,
        occurs_check: bool = True,
        strict_commit: bool = False,
        limits: Optional[Limits] = None,
        tracer: Optional[Callable[[TraceEvent], None]] = None,
    ):
        self.program: List[DFormula] = list(program)
        self.registry = registry
        self.occurs_check = occurs_check
        self.strict_commit = strict_commit
        self.limits = limits or Limits()
        self.tracer = tracer
        self._index: Dict[Tuple[str, int], List[DFormula]] = defaultdict(list)
        for d in self.program:
            for k in head_keys(d):
                self._index[k].append(d)
        self.stats = StatCounters()
        self._templates: Dict[int, tuple] = {}
        self._reset()

    def _reset(self):
        self.bindings: Dict[int, Term] = {}
        self.trail: list = []
        self.choicepoints: list = []
        self.hyps: Optional[_Hyp] = None
        self.distinguished: Optional[DFormula] = None
        self.cont = None
        self._choice_ids = itertools.count(1)

    def program_length(self) -> int:
        """Static clauses plus hypotheses currently in scope."""
        return len(self.program) + (self.hyps.size if self.hyps else 0)

    def hypotheses(self) -> List[DFormula]:
        out, h = [], self.hyps
        while h is not None:
            out.append(h.clause)
            h = h.prev
        return out

    # -- public entry

    def solve(self, goal: GFormula) -> Iterator[Answer]:
        """Yield answers for ``goal`` depth-first, left to right."""
        self.stats = StatCounters()
        self._reset()
        template: List[Tuple[str, Var]] = []
        mapping: Dict[int, Term] = {}
        while isinstance(goal, GExists):
            v = fresh_var()
            mapping[goal.var.id] = v
            template.append((goal.var.name, v))
            goal = goal.body
        if mapping:
            goal = subst_goal(goal, mapping)
        try:
            for _ in self._run(goal):
                yield {
                    name: apply(self.bindings, v) for name, v in template if name != "_"
                }
        finally:
            self._undo(0)
            self.choicepoints.clear()
            self.cont = None

    # -- machine

    def _trace(self, kind: str, depth: int, subject) -> None:
        if self.tracer is None:
            return
        if not isinstance(subject, str):
            subject = pretty_term(subject, self.bindings)
        self.tracer(TraceEvent(kind, depth, subject))

    def _run(self, goal: GFormula):
        self.cont = ((_GOAL, goal, 0), None)
        while True:
            if self.cont is None:
                yield
                if not self._backtrack():
                    return
                continue
            frame, self.cont = self.cont
            tag = frame[0]
            if tag == _GOAL:
                ok = self._goal(frame[1], frame[2])
            elif tag == _EXIT:
                self._trace("EXIT", frame[2], frame[1])
                ok = True
            elif tag == _POP:
                self.trail.append(("H", self.hyps))
                self.hyps = self.hyps.prev
                if self.tracer:
                    self._trace("POP", frame[2], pretty_clause(frame[1]))
                ok = True
            else:
                self._commit(frame[1], frame[2])
                ok = True
            if not ok and not self._backtrack():
                return

    def _goal(self, g: GFormula, depth: int) -> bool:
        max_depth = self.limits.max_depth
        if max_depth is not None and depth > max_depth:
            raise LimitExceeded(f"depth limit {max_depth} exceeded", stats=self.stats.snapshot())
        if isinstance(g, GAtom):
            if g.builtin:
                return self._builtin(g.atom, depth)
            return self._call(g.atom, depth)
        if isinstance(g, GAnd):
            self.cont = ((_GOAL, g.left, depth), ((_GOAL, g.right, depth), self.cont))
            return True
        if isinstance(g, GExists):
            body = subst_goal(g.body, {g.var.id: fresh_var()})
            self.cont = ((_GOAL, body, depth), self.cont)
            return True
        if isinstance(g, GAssume):
            self._push(g.clause, depth)
            self.cont = ((_GOAL, g.body, depth), ((_POP, g.clause, depth), self.cont))
            return True
        if isinstance(g, GLoad):
            from .modules import elaborate_load

            if self.registry is None:
                from .modules import ResolutionError

                raise ResolutionError(f"no module registry to resolve {g.url!r}")
            expanded = elaborate_load(g.url, g.body, self.registry)
            self.cont = ((_GOAL, expanded, depth), self.cont)
            return True
        raise TypeError(f"not a goal: {g!r}")

    def _push(self, clause: DFormula, depth: int) -> None:
        self.trail.append(("H", self.hyps))
        self.hyps = _Hyp(clause, self.hyps)
        self.stats.hypotheses_pushed += 1
        if self.tracer:
            self._trace("PUSH", depth, pretty_clause(clause))

    def _builtin(self, atom, depth: int) -> bool:
        if self.tracer:
            shown = pretty_goal(GAtom(apply(self.bindings, atom), True))
            self._trace("CALL", depth, shown)
        op = atom.functor
        a, b = atom.args
        if op in COMPARISONS:
            ok = compare(op, walk(a, self.bindings), walk(b, self.bindings))
        elif op == "neq":
            ok = distinct(apply(self.bindings, a), apply(self.bindings, b))
        else:
            ok = unify_into(a, b, self.bindings, self.trail, self.occurs_check)
        if self.tracer:
            self._trace("EXIT" if ok else "FAIL", depth, shown)
        return ok

    def _call(self, atom, depth: int) -> bool:
        self._trace("CALL", depth, atom)
        k = key(atom)
        cands = []
        h = self.hyps
        while h is not None:
            if k in h.keys:
                cands.append(h.clause)
            h = h.prev
        cands.extend(self._index.get(k, ()))
        cont = ((_EXIT, atom, depth), self.cont)
        self.choicepoints.append(_ClauseCP(len(self.trail), atom, depth, cands, cont))
        return self._backtrack()

    def _backtrack(self) -> bool:
        cps = self.choicepoints
        while cps:
            cp = cps[-1]
            self._undo(cp.mark)
            if type(cp) is _ClauseCP:
                if cp.idx >= len(cp.cands):
                    cps.pop()
                    self._trace("FAIL", cp.depth, cp.atom)
                    continue
                d = cp.cands[cp.idx]
                cp.idx += 1
                self._count_inference()
                k = self._descend(self._fresh_copy(d), cp.atom, (), (), cp.cont, cp.depth)
            else:
                cps.pop()
                rec = cp.rec
                if rec.committed:
                    continue
                rec.side = 1
                if self.tracer:
                    self._trace("TRY", cp.depth, f"#{rec.id}.1 {pretty_clause(rec.right)}")
                k = self._descend(rec.right, cp.atom, cp.bodies, cp.recs + (rec,), cp.cont, cp.depth)
            if k is not None:
                self.cont = k
                return True
        return False

    def _fresh_copy(self, d: DFormula) -> DFormula:
        entry = self._templates.get(id(d))
        if entry is None or entry[0] is not d:
            entry = self._templates[id(d)] = (d, *quantified(d))
        return instantiate(entry[1], entry[2])

    def _count_inference(self) -> None:
        self.stats.inferences += 1
        max_steps = self.limits.max_steps
        if max_steps is not None and self.stats.inferences > max_steps:
            raise LimitExceeded(f"step limit {max_steps} exceeded", stats=self.stats.snapshot())

    def _descend(self, d: DFormula, atom, bodies: tuple, recs: tuple, cont, depth: int):
        """Backchain on ``d`` for ``atom``: the new continuation, or None on head mismatch."""
        self.distinguished = d
        while True:
            if isinstance(d, DAtom):
                self.distinguished = None
                if not unify_into(d.atom, atom, self.bindings, self.trail, self.occurs_check):
                    return None
                k = cont
                for rec in recs:
                    k = ((_COMMIT, rec, depth), k)
                for body in reversed(bodies):
                    k = ((_GOAL, body, depth + 1), k)
                return k
            if isinstance(d, DImp):
                bodies = bodies + (d.body,)
                d = d.head
            elif isinstance(d, DChoice):
                rec = _Choice(next(self._choice_ids), d.left, d.right, len(self.choicepoints))
                self.choicepoints.append(
                    _AltCP(len(self.trail), rec, atom, bodies, recs, cont, depth)
                )
                if self.tracer:
                    self._trace("TRY", depth, f"#{rec.id}.0 {pretty_clause(d.left)}")
                recs = recs + (rec,)
                d = d.left
            elif isinstance(d, DAll):
                d = instantiate(*quantified(d))
            else:
                raise TypeError(f"not a clause: {d!r}")

    def _commit(self, rec: _Choice, depth: int) -> None:
        if rec.committed:
            return
        rec.committed = True
        self.stats.choice_commits += 1
        if self.tracer:
            chosen = rec.left if rec.side == 0 else rec.right
            self._trace("COMMIT", depth, f"#{rec.id}.{rec.side} {pretty_clause(chosen)}")
        if rec.side == 0:
            self.stats.choice_prunes += 1
            if self.tracer:
                self._trace("PRUNE", depth, f"#{rec.id}.1 {pretty_clause(rec.right)}")
        if self.strict_commit:
            del self.choicepoints[rec.height :]

    def _undo(self, mark: int) -> None:
        trail = self.trail
        bindings = self.bindings
        while len(trail) > mark:
            entry = trail.pop()
            if type(entry) is int:
                del bindings[entry]
            else:
                self.hyps = entry[1]


def solve(
    program: Iterable[DFormula],
    goal: GFormula,
    mode: str = "all",
    limits: Optional[Limits] = None,
    **options,
) -> Tuple[List[Answer], StatCounters]:
    """Collect answers (one for ``mode="first"``) and the final counters.

    Raises :class:`LimitExceeded` carrying the answers found so far.
    """
    if mode not in ("first", "all"):
        raise ValueError(f"unknown mode {mode!r}")
    solver = Solver(program, limits=limits, **options)
    answers: List[Answer] = []
    gen = solver.solve(goal)
    try:
        for ans in gen:
            answers.append(ans)
            if mode == "first":
                break
    except LimitExceeded as exc:
        exc.answers = answers
        exc.stats = solver.stats.snapshot()
        raise
    finally:
        gen.close()
    return answers, solver.stats.snapshot()


def _residual_names(answer: Answer) -> Dict[int, Term]:
    names: Dict[int, Term] = {}
    for value in answer.values():
        for v in variables(value):
            if v.id not in names:
                names[v.id] = Var(f"_G{len(names) + 1}")
    return names


def canonical_answer(answer: Answer) -> Tuple[Tuple[str, str], ...]:
    """Hashable form with residual variables renamed ``_G1, _G2, ...`` by appearance."""
    names = _residual_names(answer)
    return tuple((k, pretty_term(apply(names, v))) for k, v in answer.items())


def format_answer(answer: Answer) -> str:
    if not answer:
        return "true"
    return ", ".join(f"{k} = {v}" for k, v in canonical_answer(answer))
