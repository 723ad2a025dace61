"""Seeded random programs and queries for differential testing.

Programs have at most ``max_clauses`` Horn clauses over a handful of
predicates, terms of function-symbol depth at most 2, and at most
``max_choices`` ``&`` nodes. Predicates are layered: a clause body calls
lower predicates, and only occasionally its own, so most queries terminate.
Builtins are limited to ``=``, which cannot raise instantiation errors.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Tuple

from .formulas import (
    BUILTINS,
    DAtom,
    DChoice,
    DFormula,
    DImp,
    GAnd,
    GAssume,
    GAtom,
    GFormula,
    GLoad,
    exists,
    forall,
    formula_vars,
)
from .syntax import parse_goal, parse_program
from .terms import NIL, Compound, Const, Int, Term, Var, mklist

CONSTANTS = ("a", "b", "c")
FUNCTORS = (("f", 1), ("g", 2))
VARS = ("X", "Y", "Z")
NAMES = ("p", "q", "r", "s")


@dataclass
class Case:
    seed: int
    program_text: str
    query_text: str
    program: List[DFormula]
    goal: GFormula


class _Gen:
    def __init__(self, rng: random.Random, recursion: float):
        self.rng = rng
        self.recursion = recursion
        n = rng.randint(2, 4)
        self.preds: List[Tuple[str, int]] = [(NAMES[i], rng.randint(0, 2)) for i in range(n)]

    def term(self, depth: int, ground: bool = False) -> str:
        rng = self.rng
        if depth == 0 or rng.random() < 0.55:
            if not ground and rng.random() < 0.45:
                return rng.choice(VARS)
            return rng.choice(CONSTANTS)
        name, arity = rng.choice(FUNCTORS)
        args = ",".join(self.term(depth - 1, ground) for _ in range(arity))
        return f"{name}({args})"

    def atom(self, pred: Tuple[str, int], ground: bool = False) -> str:
        name, arity = pred
        if arity == 0:
            return name
        return f"{name}(" + ",".join(self.term(2, ground) for _ in range(arity)) + ")"

    def body_goal(self, level: int) -> str:
        rng = self.rng
        lower = self.preds[:level]
        if lower and rng.random() < 0.1:
            fact = self.atom(rng.choice(lower))
            return f"({fact}) => {self.atom(rng.choice(lower))}"
        if rng.random() < 0.12:
            return f"{rng.choice(VARS)} = {self.term(2)}"
        if not lower or rng.random() < self.recursion:
            return self.atom(self.preds[level])
        return self.atom(rng.choice(lower))

    def clause(self, level: int) -> str:
        head = self.atom(self.preds[level])
        n = self.rng.choice((0, 0, 1, 1, 2)) if level else 0
        if n == 0:
            return head
        return head + " :- " + ", ".join(self.body_goal(level) for _ in range(n))


def random_case(
    seed: int,
    max_clauses: int = 8,
    max_choices: int = 2,
    recursion: float = 0.05,
) -> Case:
    rng = random.Random(seed)
    gen = _Gen(rng, recursion)
    levels = sorted(rng.randrange(len(gen.preds)) for _ in range(rng.randint(2, max_clauses)))
    # every predicate used as a callee should have some definition
    for level in range(len(gen.preds)):
        if level not in levels and len(levels) < max_clauses:
            levels.append(level)
    levels.sort()
    clauses = [gen.clause(level) for level in levels]

    units: List[List[str]] = [[c] for c in clauses]
    for _ in range(rng.randint(0, max_choices)):
        if len(units) < 2:
            break
        # each merge adds exactly one '&'
        i = rng.randrange(len(units) - 1)
        units[i : i + 2] = [units[i] + units[i + 1]]

    def show(unit: List[str]) -> str:
        if len(unit) == 1:
            return unit[0] + "."
        return " & ".join(f"({c})" if ":-" in c else c for c in unit) + "."

    program_text = "\n".join(show(u) for u in units) + "\n"
    pred = rng.choice(gen.preds)
    if pred[1] == 0:
        query = pred[0]
    else:
        args = []
        for i in range(pred[1]):
            args.append(f"Q{i}" if rng.random() < 0.6 else gen.term(2, ground=True))
        query = f"{pred[0]}(" + ",".join(args) + ")"
    return Case(
        seed,
        program_text,
        query,
        parse_program(program_text).clauses,
        parse_goal(query),
    )


def random_cases(n: int, base_seed: int = 0, **kw) -> List[Case]:
    return [random_case(base_seed + i, **kw) for i in range(n)]


# -- random terms and formulas (AST level) -----------------------------------

TERM_VARS = ("X", "Y", "Z", "W")
PRED_ARITIES = (("p", 0), ("q", 1), ("r", 2), ("memb", 2))


def random_term(rng: random.Random, depth: int, pool=None) -> Term:
    """Term of function-symbol depth at most ``depth``."""
    pool = pool if pool is not None else [Var(n) for n in TERM_VARS]
    roll = rng.random()
    if depth == 0 or roll < 0.3:
        if rng.random() < 0.5:
            return rng.choice(pool)
        if rng.random() < 0.3:
            return Int(rng.randint(-9, 9))
        return Const(rng.choice(CONSTANTS))
    if roll < 0.4:
        items = [random_term(rng, depth - 1, pool) for _ in range(rng.randint(1, 3))]
        return mklist(items, rng.choice([NIL, rng.choice(pool)]))
    name, arity = rng.choice(FUNCTORS + (("h", 3),))
    return Compound(name, tuple(random_term(rng, depth - 1, pool) for _ in range(arity)))


def _perturb(rng: random.Random, t: Term, depth: int, pool) -> Term:
    if isinstance(t, Compound) and rng.random() < 0.7:
        return Compound(t.functor, tuple(_perturb(rng, a, depth - 1, pool) for a in t.args))
    if rng.random() < 0.5:
        return t
    return random_term(rng, max(depth, 0), pool)


def random_term_pair(rng: random.Random, depth: int = 5) -> Tuple[Term, Term]:
    """Two terms over a shared variable pool; about half are near-instances
    of each other, so a good share of pairs unify."""
    pool = [Var(n) for n in TERM_VARS]
    t1 = random_term(rng, depth, pool)
    if rng.random() < 0.5:
        return t1, random_term(rng, depth, pool)
    return t1, _perturb(rng, t1, depth, pool)


def cyclic_pair(rng: random.Random, depth: int = 4) -> Tuple[Term, Term]:
    """A pair whose only would-be unifier binds a variable to a term containing it."""
    x = Var("X")
    pool = [Var(n) for n in TERM_VARS[1:]]
    inner: Term = x
    for _ in range(rng.randint(1, depth)):
        name, arity = rng.choice(FUNCTORS + (("cons", 2),))
        args = [random_term(rng, 1, pool) for _ in range(arity)]
        args[rng.randrange(arity)] = inner
        inner = Compound(name, tuple(args))
    if rng.random() < 0.5:
        return x, inner
    # hide the cycle one level down: f(X, Y) vs f(t[X], t[X])
    return Compound("k", (x, inner)), Compound("k", (inner, x))


def _atom(rng: random.Random, pool) -> Term:
    name, arity = rng.choice(PRED_ARITIES)
    if arity == 0:
        return Const(name)
    return Compound(name, tuple(random_term(rng, 2, pool) for _ in range(arity)))


def _goal(rng: random.Random, depth: int, pool) -> GFormula:
    roll = rng.random()
    if depth <= 1 or roll < 0.35:
        if rng.random() < 0.2:
            op, _ = rng.choice(sorted(BUILTINS))
            t = Compound(op, (random_term(rng, 1, pool), random_term(rng, 1, pool)))
            return GAtom(t, True)
        return GAtom(_atom(rng, pool), False)
    if roll < 0.7:
        return GAnd(_goal(rng, depth - 1, pool), _goal(rng, depth - 1, pool))
    if roll < 0.85:
        return GAssume(_clause(rng, depth - 1, pool), _goal(rng, depth - 1, pool))
    url = "".join(rng.choice('abc./:-"\\') for _ in range(rng.randint(1, 10)))
    return GLoad(url, _goal(rng, depth - 1, pool))


def _clause(rng: random.Random, depth: int, pool) -> DFormula:
    roll = rng.random()
    if depth <= 1 or roll < 0.3:
        return DAtom(_atom(rng, pool))
    if roll < 0.65:
        return DImp(_goal(rng, depth - 1, pool), _clause(rng, depth - 1, pool))
    return DChoice(_clause(rng, depth - 1, pool), _clause(rng, depth - 1, pool))


def random_clause(rng: random.Random, depth: int = 6) -> DFormula:
    """Closed clause unit of formula depth at most ``depth``."""
    d = _clause(rng, depth, [Var(n) for n in TERM_VARS])
    return forall(formula_vars(d), d)


def random_goal(rng: random.Random, depth: int = 6) -> GFormula:
    """Closed goal of formula depth at most ``depth``."""
    g = _goal(rng, depth, [Var(n) for n in TERM_VARS])
    return exists(formula_vars(g), g)
