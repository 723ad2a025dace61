"""Goal and clause formulas.

Goals::

    G ::= A | G , G | D => G | "url" => G | exists x. G

Clauses::

    D ::= A | G -> D | forall x. D | D & D
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from .terms import Compound, Const, Term, Var, fresh_var, key, variables

BUILTINS = frozenset({("ge", 2), ("gt", 2), ("le", 2), ("lt", 2), ("neq", 2), ("=", 2)})


def is_builtin(atom: Term) -> bool:
    return isinstance(atom, Compound) and (atom.functor, len(atom.args)) in BUILTINS


@dataclass(frozen=True)
class GAtom:
    atom: Term
    builtin: bool = False

    def __post_init__(self):
        if not isinstance(self.atom, (Const, Compound)):
            raise TypeError(f"goal atom must be a constant or compound: {self.atom!r}")


@dataclass(frozen=True)
class GAnd:
    left: "GFormula"
    right: "GFormula"


@dataclass(frozen=True)
class GAssume:
    clause: "DFormula"
    body: "GFormula"


@dataclass(frozen=True)
class GLoad:
    url: str
    body: "GFormula"

    def __post_init__(self):
        if not self.url:
            raise ValueError("empty module url")


@dataclass(frozen=True)
class GExists:
    var: Var
    body: "GFormula"


@dataclass(frozen=True)
class DAtom:
    atom: Term

    def __post_init__(self):
        if not isinstance(self.atom, (Const, Compound)):
            raise TypeError(f"clause head must be a constant or compound: {self.atom!r}")


@dataclass(frozen=True)
class DImp:
    """``body -> head``; concrete syntax ``head :- body``."""

    body: "GFormula"
    head: "DFormula"


@dataclass(frozen=True)
class DAll:
    var: Var
    inner: "DFormula"


@dataclass(frozen=True)
class DChoice:
    left: "DFormula"
    right: "DFormula"


GFormula = Union[GAtom, GAnd, GAssume, GLoad, GExists]
DFormula = Union[DAtom, DImp, DAll, DChoice]


@dataclass
class SourceModule:
    url: Optional[str]
    clauses: List[DFormula]


def gand(*goals: GFormula) -> GFormula:
    """Right-associated conjunction of one or more goals."""
    out = goals[-1]
    for g in reversed(goals[:-1]):
        out = GAnd(g, out)
    return out


def choice(*clauses: DFormula) -> DFormula:
    out = clauses[-1]
    for d in reversed(clauses[:-1]):
        out = DChoice(d, out)
    return out


def forall(vs, d: DFormula) -> DFormula:
    for v in reversed(list(vs)):
        d = DAll(v, d)
    return d


def exists(vs, g: GFormula) -> GFormula:
    for v in reversed(list(vs)):
        g = GExists(v, g)
    return g


# -- substitution over formulas ---------------------------------------------


def replace_vars(t: Term, m: Dict[int, Term]) -> Term:
    """Single-pass variable replacement (no dereferencing of the replacements)."""
    if isinstance(t, Var):
        return m.get(t.id, t)
    if not isinstance(t, Compound):
        return t
    spine = []
    while isinstance(t, Compound):
        spine.append(t)
        t = t.args[-1]
    out = m.get(t.id, t) if isinstance(t, Var) else t
    for c in reversed(spine):
        args = tuple(replace_vars(a, m) for a in c.args[:-1]) + (out,)
        out = Compound(c.functor, args)
    return out


def subst_goal(g: GFormula, s: Dict[int, Term]) -> GFormula:
    """Replace variables in ``g`` by ``s`` (one pass; ``s`` is not dereferenced)."""
    if isinstance(g, GAtom):
        return GAtom(replace_vars(g.atom, s), g.builtin)
    if isinstance(g, GAnd):
        spine = []
        while isinstance(g, GAnd):
            spine.append(subst_goal(g.left, s))
            g = g.right
        out = subst_goal(g, s)
        for left in reversed(spine):
            out = GAnd(left, out)
        return out
    if isinstance(g, GAssume):
        return GAssume(subst_clause(g.clause, s), subst_goal(g.body, s))
    if isinstance(g, GLoad):
        return GLoad(g.url, subst_goal(g.body, s))
    if isinstance(g, GExists):
        return GExists(g.var, subst_goal(g.body, s))
    raise TypeError(f"not a goal: {g!r}")


def subst_clause(d: DFormula, s: Dict[int, Term]) -> DFormula:
    if isinstance(d, DAtom):
        return DAtom(replace_vars(d.atom, s))
    if isinstance(d, DImp):
        return DImp(subst_goal(d.body, s), subst_clause(d.head, s))
    if isinstance(d, DAll):
        return DAll(d.var, subst_clause(d.inner, s))
    if isinstance(d, DChoice):
        return DChoice(subst_clause(d.left, s), subst_clause(d.right, s))
    raise TypeError(f"not a clause: {d!r}")


def quantified(d: DFormula) -> Tuple[DFormula, List[Var]]:
    """Split ``d`` into its quantifier-free matrix and the variables bound in it."""
    bound: List[Var] = []

    def strip(d):
        if isinstance(d, DAll):
            bound.append(d.var)
            return strip(d.inner)
        if isinstance(d, DImp):
            return DImp(d.body, strip(d.head))
        if isinstance(d, DChoice):
            return DChoice(strip(d.left), strip(d.right))
        return d

    return strip(d), bound


def instantiate(matrix: DFormula, bound: List[Var]) -> DFormula:
    if not bound:
        return matrix
    return subst_clause(matrix, {v.id: fresh_var() for v in bound})


def rename_fresh(d: DFormula) -> DFormula:
    """Instantiate every universally quantified variable of ``d`` with a fresh one.

    Quantifier nodes disappear. A variable bound above a ``&`` gets one fresh
    copy shared by both sides. Free variables are left alone.
    """
    return instantiate(*quantified(d))


def head_keys(d: DFormula) -> FrozenSet[Tuple[str, int]]:
    """Predicate indicators of all heads reachable in ``d``."""
    if isinstance(d, DAtom):
        return frozenset([key(d.atom)])
    if isinstance(d, DImp):
        return head_keys(d.head)
    if isinstance(d, DAll):
        return head_keys(d.inner)
    return head_keys(d.left) | head_keys(d.right)


def leaf_clauses(d: DFormula) -> List[DFormula]:
    """The Horn clauses joined by ``&`` in ``d`` (quantifiers dropped)."""
    if isinstance(d, DAll):
        return leaf_clauses(d.inner)
    if isinstance(d, DChoice):
        return leaf_clauses(d.left) + leaf_clauses(d.right)
    return [d]


def has_choice(d) -> bool:
    if isinstance(d, DChoice):
        return True
    if isinstance(d, DAll):
        return has_choice(d.inner)
    if isinstance(d, DImp):
        return has_choice(d.head) or has_choice(d.body)
    if isinstance(d, GAnd):
        return has_choice(d.left) or has_choice(d.right)
    if isinstance(d, GAssume):
        return has_choice(d.clause) or has_choice(d.body)
    if isinstance(d, (GLoad, GExists)):
        return has_choice(d.body)
    return False


# -- variables ----------------------------------------------------------------


def formula_vars(f) -> List[Var]:
    """All variables occurring in ``f`` (bound or free), first-occurrence order."""
    seen: Dict[int, Var] = {}

    def go(f):
        while isinstance(f, GAnd):
            go(f.left)
            f = f.right
        if isinstance(f, (GAtom, DAtom)):
            for v in variables(f.atom):
                seen.setdefault(v.id, v)
        elif isinstance(f, DChoice):
            go(f.left)
            go(f.right)
        elif isinstance(f, GAssume):
            go(f.clause)
            go(f.body)
        elif isinstance(f, DImp):
            # concrete order is head first: ``head :- body``
            go(f.head)
            go(f.body)
        elif isinstance(f, (GExists, DAll)):
            seen.setdefault(f.var.id, f.var)
            go(f.body if isinstance(f, GExists) else f.inner)
        elif isinstance(f, GLoad):
            go(f.body)
        else:
            raise TypeError(f"not a formula: {f!r}")

    go(f)
    return list(seen.values())


def alpha_equal(x, y) -> bool:
    """Structural equality of terms/formulas up to a bijective variable renaming."""
    fwd: Dict[int, int] = {}
    bwd: Dict[int, int] = {}

    def same_var(a: Var, b: Var) -> bool:
        if fwd.get(a.id, b.id) != b.id or bwd.get(b.id, a.id) != a.id:
            return False
        fwd[a.id] = b.id
        bwd[b.id] = a.id
        return True

    stack = [(x, y)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Var) or isinstance(b, Var):
            if not (isinstance(a, Var) and isinstance(b, Var) and same_var(a, b)):
                return False
            continue
        if type(a) is not type(b):
            return False
        if isinstance(a, Compound):
            if a.functor != b.functor or len(a.args) != len(b.args):
                return False
            stack.extend(zip(a.args, b.args))
        elif isinstance(a, GAtom):
            if a.builtin != b.builtin:
                return False
            stack.append((a.atom, b.atom))
        elif isinstance(a, DAtom):
            stack.append((a.atom, b.atom))
        elif isinstance(a, (GAnd, DChoice)):
            stack.extend([(a.left, b.left), (a.right, b.right)])
        elif isinstance(a, GAssume):
            stack.extend([(a.clause, b.clause), (a.body, b.body)])
        elif isinstance(a, DImp):
            stack.extend([(a.head, b.head), (a.body, b.body)])
        elif isinstance(a, GLoad):
            if a.url != b.url:
                return False
            stack.append((a.body, b.body))
        elif isinstance(a, GExists):
            stack.extend([(a.var, b.var), (a.body, b.body)])
        elif isinstance(a, DAll):
            stack.extend([(a.var, b.var), (a.inner, b.inner)])
        elif a != b:
            return False
    return True
