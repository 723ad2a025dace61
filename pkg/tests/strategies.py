"""Hypothesis strategies for terms and formulas."""
from hypothesis import strategies as st

from linweb.formulas import (
    DAtom,
    DChoice,
    DImp,
    GAnd,
    GAssume,
    GAtom,
    GLoad,
    exists,
    forall,
    formula_vars,
    is_builtin,
)
from linweb.terms import NIL, Compound, Const, Int, Var, mklist

POOL = {name: Var(name) for name in ("X", "Y", "Z", "Acc_1")}

variables = st.sampled_from(sorted(POOL.values(), key=lambda v: v.name))
constants = st.sampled_from([Const("a"), Const("b"), Const("hello_world"), NIL, Const("Quoted atom")])
integers = st.integers(-50, 50).map(Int)


def terms(max_depth=3, functors=(("f", 1), ("g", 2), ("h", 3))):
    leaves = st.one_of(variables, constants, integers)

    def extend(children):
        compound = st.sampled_from(functors).flatmap(
            lambda fa: st.tuples(*([children] * fa[1])).map(lambda args: Compound(fa[0], args))
        )
        lists = st.tuples(st.lists(children, min_size=1, max_size=3), st.one_of(st.just(NIL), variables)).map(
            lambda p: mklist(p[0], p[1])
        )
        return st.one_of(compound, lists)

    return st.recursive(leaves, extend, max_leaves=2 ** max_depth)


def term_depth(t):
    if isinstance(t, Compound):
        return 1 + max(term_depth(a) for a in t.args)
    return 0


PREDICATES = [("p", 0), ("q", 1), ("r", 2), ("memb", 2)]
CMP = ["ge", "gt", "le", "lt", "neq", "="]


@st.composite
def atoms(draw):
    name, arity = draw(st.sampled_from(PREDICATES))
    if arity == 0:
        return Const(name)
    return Compound(name, tuple(draw(terms(2)) for _ in range(arity)))


@st.composite
def goal_atoms(draw):
    if draw(st.booleans()) and draw(st.booleans()):
        op = draw(st.sampled_from(CMP))
        t = Compound(op, (draw(terms(1)), draw(terms(1))))
    else:
        t = draw(atoms())
    return GAtom(t, is_builtin(t))


urls = st.text(alphabet='abc./:"\\-_', min_size=1, max_size=12)


def goals(depth):
    if depth <= 1:
        return goal_atoms()
    sub = goals(depth - 1)
    return st.one_of(
        goal_atoms(),
        st.builds(GAnd, sub, sub),
        st.builds(GAssume, st.deferred(lambda: clauses(depth - 1)), sub),
        st.builds(GLoad, urls, sub),
    )


def clauses(depth):
    if depth <= 1:
        return atoms().map(DAtom)
    sub = clauses(depth - 1)
    return st.one_of(
        atoms().map(DAtom),
        st.builds(DImp, goals(depth - 1), sub),
        st.builds(DChoice, sub, sub),
    )


def closed_clauses(depth=6):
    """Clause units as the parser produces them: quantifiers over all variables."""
    return clauses(depth).map(lambda d: forall(formula_vars(d), d))


def closed_goals(depth=6):
    return goals(depth).map(lambda g: exists(formula_vars(g), g))
