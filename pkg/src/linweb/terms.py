"""First-order terms, substitutions and unification.

Terms are immutable. A substitution is a plain ``dict`` from variable id to
term. The engine works on a mutable binding map plus a trail (see
:func:`unify_into`); the functional :func:`unify` is the value-level API.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

_ids = itertools.count(1)


def fresh_id() -> int:
    return next(_ids)


class Var:
    """Logic variable. Identity is the integer id; the name is for display."""

    __slots__ = ("name", "id")

    def __init__(self, name: str, id: Optional[int] = None):
        self.name = name
        self.id = fresh_id() if id is None else id

    def __eq__(self, other):
        return isinstance(other, Var) and other.id == self.id

    def __hash__(self):
        return hash(("var", self.id))

    def __repr__(self):
        return f"Var({self.name!r}, {self.id})"


def fresh_var(name: Optional[str] = None) -> Var:
    i = fresh_id()
    return Var(name if name is not None else f"_G{i}", i)


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True, eq=False)
class Compound:
    functor: str
    args: Tuple["Term", ...]

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError("compound terms need at least one argument")

    @property
    def arity(self) -> int:
        return len(self.args)

    # iterative so that long lists compare and hash without deep recursion
    def __eq__(self, other):
        if not isinstance(other, Compound):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            x, y = stack.pop()
            if x is y:
                continue
            if isinstance(x, Compound):
                if not isinstance(y, Compound) or x.functor != y.functor or len(x.args) != len(y.args):
                    return False
                stack.extend(zip(x.args, y.args))
            elif x != y:
                return False
        return True

    def __hash__(self):
        h = []
        stack = [self]
        while stack:
            x = stack.pop()
            if isinstance(x, Compound):
                h.append((x.functor, len(x.args)))
                stack.extend(reversed(x.args))
            else:
                h.append(x)
        return hash(tuple(h))


Term = Union[Var, Const, Int, Compound]
Substitution = Dict[int, Term]

NIL = Const("nil")


def cons(head: Term, tail: Term) -> Compound:
    return Compound("cons", (head, tail))


def mklist(items, tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


def key(t: Term) -> Tuple[str, int]:
    """Predicate indicator ``(name, arity)`` of an atom."""
    if isinstance(t, Compound):
        return (t.functor, len(t.args))
    if isinstance(t, Const):
        return (t.name, 0)
    raise TypeError(f"not an atom: {t!r}")


def walk(t: Term, s: Substitution) -> Term:
    while isinstance(t, Var):
        nxt = s.get(t.id)
        if nxt is None:
            return t
        t = nxt
    return t


def occurs(var_id: int, t: Term, s: Substitution) -> bool:
    stack = [t]
    while stack:
        t = walk(stack.pop(), s)
        if isinstance(t, Var):
            if t.id == var_id:
                return True
        elif isinstance(t, Compound):
            stack.extend(t.args)
    return False


def unify_into(
    a: Term,
    b: Term,
    s: Substitution,
    trail: Optional[List] = None,
    occurs_check: bool = True,
) -> bool:
    """Destructively extend ``s`` so that ``a`` and ``b`` become equal.

    Every new binding's variable id is appended to ``trail``. On failure some
    bindings may already have been made; the caller undoes them via the trail.
    """
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = walk(x, s)
        y = walk(y, s)
        if x is y:
            continue
        if isinstance(x, Var):
            if isinstance(y, Var) and x.id == y.id:
                continue
            if occurs_check and occurs(x.id, y, s):
                return False
            s[x.id] = y
            if trail is not None:
                trail.append(x.id)
        elif isinstance(y, Var):
            if occurs_check and occurs(y.id, x, s):
                return False
            s[y.id] = x
            if trail is not None:
                trail.append(y.id)
        elif isinstance(x, Compound):
            if (
                not isinstance(y, Compound)
                or x.functor != y.functor
                or len(x.args) != len(y.args)
            ):
                return False
            stack.extend(zip(x.args, y.args))
        elif x != y:
            return False
    return True


def apply(s: Substitution, t: Term, _active=()) -> Term:
    """Replace bound variables in ``t`` until none remains.

    A variable met again while its own binding is being expanded (only
    possible with occurs-check disabled) is left in place.
    """
    if not s:
        return t
    out: List[Term] = []
    active = set(_active)
    todo: list = [(0, t)]
    while todo:
        op, x = todo.pop()
        if op == 0:
            if isinstance(x, Var):
                b = s.get(x.id)
                if b is None or x.id in active:
                    out.append(x)
                else:
                    active.add(x.id)
                    todo.append((2, x.id))
                    todo.append((0, b))
            elif isinstance(x, Compound):
                todo.append((1, x))
                todo.extend((0, arg) for arg in reversed(x.args))
            else:
                out.append(x)
        elif op == 1:
            n = len(x.args)
            args = tuple(out[-n:])
            del out[-n:]
            if all(p is q for p, q in zip(args, x.args)):
                out.append(x)
            else:
                out.append(Compound(x.functor, args))
        else:
            active.discard(x)
    return out[0]


def unify(
    t1: Term,
    t2: Term,
    s: Optional[Substitution] = None,
    occurs_check: bool = True,
) -> Optional[Substitution]:
    """Most general unifier of ``t1`` and ``t2`` extending ``s``, or None.

    The input is never modified. With occurs-check on the result is
    idempotent: no bound variable occurs in any binding.
    """
    out = dict(s) if s else {}
    if not unify_into(t1, t2, out, None, occurs_check):
        return None
    return {k: apply(out, v, (k,)) for k, v in out.items()}


def variables(t: Term) -> List[Var]:
    """Distinct variables of ``t`` in left-to-right first-occurrence order."""
    seen = {}
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Var):
            seen.setdefault(x.id, x)
        elif isinstance(x, Compound):
            stack.extend(reversed(x.args))
    return list(seen.values())


def is_ground(t: Term) -> bool:
    return not variables(t)
