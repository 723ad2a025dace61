import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from linweb.formulas import DAll, DAtom, DChoice, alpha_equal, formula_vars, rename_fresh, replace_vars
from linweb.terms import Compound, Const, Int, Var, apply, mklist, unify, variables

from strategies import terms

a, b = Const("a"), Const("b")


def f(*args):
    return Compound("f", args)


def g(*args):
    return Compound("g", args)


X, Y, Z = Var("X"), Var("Y"), Var("Z")


class TestApply:
    def test_binds_variable(self):
        assert apply({X.id: a}, f(X, Y)) == f(a, Y)

    def test_empty_is_identity(self):
        assert apply({}, f(X)) == f(X)

    def test_dereferences_fully(self):
        assert apply({X.id: g(Y), Y.id: b}, X) == g(b)

    def test_long_list_no_recursion_limit(self):
        n = 20000
        s = {X.id: mklist([Int(i) for i in range(n)])}
        out = apply(s, f(X))
        assert out.args[0] == mklist([Int(i) for i in range(n)])

    def test_cyclic_binding_terminates(self):
        assert apply({X.id: f(X)}, X) == f(X)


class TestUnify:
    def test_decomposition(self):
        assert unify(f(X, b), f(a, Y), {}) == {X.id: a, Y.id: b}

    def test_functor_clash(self):
        assert unify(f(a), g(a), {}) is None

    def test_arity_clash(self):
        assert unify(f(a), f(a, a)) is None

    def test_constant_clash(self):
        assert unify(a, b) is None
        assert unify(Int(1), Const("1")) is None

    def test_occurs_check(self):
        assert unify(X, f(X), {}) is None
        assert unify(X, f(X), {}, occurs_check=False) == {X.id: f(X)}

    def test_input_not_modified_on_failure(self):
        s = {Z.id: a}
        assert unify(f(X, a), f(b, b), s) is None
        assert s == {Z.id: a}

    def test_extends_existing(self):
        s = unify(f(X), f(Y), {Y.id: a})
        assert apply(s, X) == a

    def test_result_is_idempotent(self):
        s = unify(f(X, Y, Z), f(g(Y), g(Z), a))
        for v in s.values():
            assert not any(u.id in s for u in variables(v))


# -- properties --------------------------------------------------------------


@st.composite
def term_pairs(draw, depth=4):
    t1 = draw(terms(depth))
    if draw(st.booleans()):
        return t1, draw(terms(depth))

    def perturb(t):
        if isinstance(t, Compound) and draw(st.booleans()):
            return Compound(t.functor, tuple(perturb(x) for x in t.args))
        return draw(st.one_of(st.just(t), st.sampled_from([X, Y, Z, a]), terms(2)))

    return t1, perturb(t1)


@given(term_pairs())
@settings(max_examples=150)
def test_unifier_is_sound(pair):
    t1, t2 = pair
    s = unify(t1, t2, {})
    if s is not None:
        assert apply(s, t1) == apply(s, t2)


@given(term_pairs())
@settings(max_examples=150)
def test_unifier_is_idempotent(pair):
    t1, t2 = pair
    s = unify(t1, t2, {})
    if s is not None:
        for t in (t1, t2):
            once = apply(s, t)
            assert apply(s, once) == once


@given(terms(3), terms(3))
@settings(max_examples=200)
def test_unify_is_symmetric_in_success(t1, t2):
    assert (unify(t1, t2) is None) == (unify(t2, t1) is None)


# most-generality: brute force over a small alphabet

SMALL = [a, b, f(a), g(a, b), Var("W")]


@st.composite
def small_terms(draw, depth=3):
    if depth == 0 or draw(st.integers(0, 2)) == 0:
        return draw(st.sampled_from([X, Y, a, b]))
    if draw(st.booleans()):
        return f(draw(small_terms(depth - 1)))
    return g(draw(small_terms(depth - 1)), draw(small_terms(depth - 1)))


def brute_force_unifiers(t1, t2):
    vs = sorted({v.id: v for v in variables(t1) + variables(t2)}.values(), key=lambda v: v.id)
    for image in itertools.product(SMALL, repeat=len(vs)):
        sigma = {v.id: t for v, t in zip(vs, image)}
        if replace_vars(t1, sigma) == replace_vars(t2, sigma):
            yield vs, sigma


@given(small_terms(), small_terms())
@settings(max_examples=300)
def test_unifier_is_most_general(t1, t2):
    s = unify(t1, t2)
    found = list(brute_force_unifiers(t1, t2))
    if s is None:
        assert found == []
        return
    for vs, sigma in found:
        # sigma factors through s: sigma = sigma . s on every variable
        for v in vs:
            assert replace_vars(apply(s, v), sigma) == sigma[v.id]


# -- renaming --------------------------------------------------------------------


class TestRenameFresh:
    def test_strips_quantifier(self):
        d = DAll(X, DAtom(Compound("p", (X,))))
        out = rename_fresh(d)
        assert isinstance(out, DAtom)
        (v,) = out.atom.args
        assert isinstance(v, Var) and v != X

    def test_sharing_across_choice(self):
        d = DAll(X, DAll(Y, DChoice(DAtom(Compound("p", (X, Y))), DAtom(Compound("q", (Y, X))))))
        out = rename_fresh(d)
        x1, y1 = out.left.atom.args
        y2, x2 = out.right.atom.args
        assert x1 == x2 and y1 == y2 and x1 != y1
        assert {x1, y1}.isdisjoint({X, Y})

    def test_fresh_each_call(self):
        d = DAll(X, DAtom(Compound("p", (X,))))
        v1 = rename_fresh(d).atom.args[0]
        v2 = rename_fresh(d).atom.args[0]
        assert v1 != v2

    def test_free_variables_untouched(self):
        d = DAtom(Compound("p", (X,)))
        assert rename_fresh(d) == d

    @given(st.lists(terms(2), min_size=1, max_size=3))
    def test_structure_preserved(self, args):
        atom = Compound("p", tuple(args))
        d = DAtom(atom)
        for v in reversed(formula_vars(d)):
            d = DAll(v, d)
        out = rename_fresh(d)
        assert alpha_equal(out, DAtom(atom))
