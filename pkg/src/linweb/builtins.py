"""Deterministic guard predicates: ge/gt/le/lt over integers, neq, and ``=``."""
from __future__ import annotations

import operator
from typing import Optional

from .terms import Compound, Int, Substitution, Term, apply, is_ground, unify, walk

COMPARISONS = {
    "ge": operator.ge,
    "gt": operator.gt,
    "le": operator.le,
    "lt": operator.lt,
}


class InstantiationError(Exception):
    pass


def compare(op: str, a: Term, b: Term) -> bool:
    """Evaluate an integer comparison on already-dereferenced arguments."""
    if not (isinstance(a, Int) and isinstance(b, Int)):
        raise InstantiationError(f"{op}/2 needs two integers, got {a!r} and {b!r}")
    return COMPARISONS[op](a.value, b.value)


def distinct(a: Term, b: Term) -> bool:
    """neq/2 on fully resolved arguments."""
    if not (is_ground(a) and is_ground(b)):
        raise InstantiationError("neq/2 needs ground arguments")
    return a != b


def call_builtin(
    atom: Compound, s: Substitution, occurs_check: bool = True
) -> Optional[Substitution]:
    """Run a builtin under ``s``; the (possibly extended) substitution or None."""
    op = atom.functor
    if op in COMPARISONS:
        a, b = (walk(x, s) for x in atom.args)
        return s if compare(op, a, b) else None
    if op == "neq":
        a, b = (apply(s, x) for x in atom.args)
        return s if distinct(a, b) else None
    if op == "=":
        return unify(atom.args[0], atom.args[1], s, occurs_check)
    raise ValueError(f"unknown builtin {op}/{len(atom.args)}")
