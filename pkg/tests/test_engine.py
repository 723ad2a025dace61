import re

import pytest

from linweb.builtins import InstantiationError
from linweb.engine import LimitExceeded, Limits, Solver, StatCounters, canonical_answer, solve
from linweb.syntax import parse_goal, parse_program

from conftest import program, run


def traced(prog, query, **kw):
    if isinstance(prog, str):
        prog = parse_program(prog).clauses
    events = []
    solver = Solver(prog, tracer=events.append, **kw)
    answers = list(solver.solve(parse_goal(query)))
    return answers, [str(e) for e in events], solver


def pruned_then_tried(lines):
    """Choice sides explored after having been pruned."""
    pruned = set()
    bad = []
    for line in lines:
        m = re.match(r"(PRUNE|TRY) \d+ (#\d+\.\d)", line)
        if not m:
            continue
        kind, side = m.groups()
        if kind == "PRUNE":
            pruned.add(side)
        elif side in pruned:
            bad.append(line)
    return bad


class TestBasics:
    def test_fact(self):
        assert run("p(a). p(b).", "p(X)") == (["X = a", "X = b"], StatCounters(2, 0, 0, 0))

    def test_first_mode(self):
        answers, _ = run("p(a). p(b).", "p(X)", mode="first")
        assert answers == ["X = a"]

    def test_failure(self):
        assert run("p(a).", "p(b)")[0] == []

    def test_unknown_predicate_fails(self):
        assert run("p(a).", "q(X)")[0] == []

    def test_conjunction_shares_bindings(self):
        answers, _ = run("p(a). p(b). q(b).", "p(X), q(X)")
        assert answers == ["X = b"]

    def test_rule(self):
        prog = "parent(ann, bob). parent(bob, cy). grand(X, Z) :- parent(X, Y), parent(Y, Z)."
        assert run(prog, "grand(ann, W)")[0] == ["W = cy"]

    def test_variable_free_goal(self):
        assert run("p.", "p")[0] == ["true"]

    def test_answers_only_mention_query_variables(self):
        answers, _ = run("q(X, Y) :- Y = f(X, Z).", "q(a, R)")
        assert answers == ["R = f(a,_G1)"]

    def test_anonymous_query_variable_not_reported(self):
        assert run("p(a, b).", "p(_, X)")[0] == ["X = b"]

    def test_clause_order_is_source_order(self):
        assert run("p(2). p(1). p(3).", "p(X)")[0] == ["X = 2", "X = 1", "X = 3"]

    def test_no_occurs_check_option(self):
        assert run("p(X, X).", "p(Y, f(Y))")[0] == []
        assert len(run("p(X, X).", "p(Y, f(Y))", occurs_check=False)[0]) == 1

    def test_long_recursion_has_no_python_stack_limit(self):
        items = ",".join(str(i) for i in range(3000))
        answers, stats = run(program("append_plain.lw"), f"append([{items}], [x], L)", mode="first")
        assert answers[0].endswith(",2999,x]")
        # every clause tried counts: the base case is tried at each level too
        assert stats.inferences == 2 * 3000 + 1


class TestBuiltins:
    @pytest.mark.parametrize(
        "goal, ok",
        [("3 >= 3", True), ("2 >= 3", False), ("4 > 3", True), ("3 > 3", False),
         ("3 =< 3", True), ("4 =< 3", False), ("2 < 3", True), ("3 < 3", False),
         ("neq(a, b)", True), ("neq(f(a), f(a))", False), ("f(X) = f(a)", True), ("a = b", False)],
    )
    def test_truth(self, goal, ok):
        assert bool(run("", goal)[0]) is ok

    def test_equality_binds(self):
        assert run("", "X = f(Y), Y = a")[0] == ["X = f(a), Y = a"]

    def test_comparison_needs_integers(self):
        with pytest.raises(InstantiationError):
            solve([], parse_goal("X >= 3"))
        with pytest.raises(InstantiationError):
            solve([], parse_goal("a < 3"))

    def test_neq_needs_ground_arguments(self):
        with pytest.raises(InstantiationError):
            solve([], parse_goal("neq(X, a)"))

    def test_builtin_after_binding(self):
        assert run("n(1). n(5). n(9).", "n(X), X > 4")[0] == ["X = 5", "X = 9"]


class TestCommittedChoice:
    def test_max_first_side(self, max_program):
        answers, stats = run(max_program, "max(9,3,M)")
        assert answers == ["M = 9"]
        assert (stats.choice_commits, stats.choice_prunes) == (1, 1)

    def test_max_second_side(self, max_program):
        answers, stats = run(max_program, "max(3,9,M)")
        assert answers == ["M = 9"]
        assert (stats.choice_commits, stats.choice_prunes) == (1, 0)

    def test_max_equal(self, max_program):
        assert run(max_program, "max(4,4,M)")[0] == ["M = 4"]

    def test_append_has_no_backtracking_point(self, append_program):
        answers, _ = run(append_program, "append(X, Y, [1,2])")
        assert answers == ["X = [], Y = [1,2]"]
        assert len(run(program("append_plain.lw"), "append(X, Y, [1,2])")[0]) == 3

    def test_pruned_side_never_tried(self, append_program):
        _, lines, _ = traced(append_program, "append(X, Y, [1,2])")
        assert any(line.startswith("PRUNE") for line in lines)
        assert pruned_then_tried(lines) == []

    def test_memb_is_deterministic(self):
        assert run(program("lists.lw"), "memb(a,[a,b,a])")[0] == ["true"]

    def test_memb_trace(self):
        answers, lines, _ = traced(program("lists.lw"), "memb(a,[b,a])")
        assert answers == [{}]
        kinds = [line.split()[0] for line in lines]
        assert kinds == [
            "CALL", "TRY", "TRY", "CALL", "EXIT", "CALL", "TRY", "COMMIT", "PRUNE",
            "EXIT", "COMMIT", "EXIT", "FAIL", "FAIL",
        ]
        assert lines[0] == "CALL 0 memb(a,[b,a])"
        assert lines[3] == "CALL 1 neq(a,b)"

    def test_failed_left_side_is_not_pruned(self):
        _, stats = run("p(X) :- X = a, fail & p(b).", "p(Y)")
        assert stats.choice_prunes == 0
        assert stats.choice_commits == 1

    def test_committed_side_keeps_its_own_alternatives(self):
        prog = "q(a). q(b). (p(X) :- q(X)) & p(z)."
        assert run(prog, "p(X)")[0] == ["X = a", "X = b"]

    def test_strict_commit_drops_them(self):
        prog = "q(a). q(b). (p(X) :- q(X)) & p(z)."
        assert run(prog, "p(X)", strict_commit=True)[0] == ["X = a"]

    def test_commit_happens_on_body_success_only(self):
        # the left head matches but its body fails: the right side runs
        assert run("(p(X) :- X = b, q) & p(c). q :- a = b.", "p(X)")[0] == ["X = c"]

    def test_nested_choices(self):
        prog = "p(a) & (p(b) & p(c))."
        assert run(prog, "p(X)")[0] == ["X = a"]
        assert run(prog, "p(c)")[0] == ["true"]
        _, stats = run(prog, "p(b)")
        assert stats.choice_commits >= 1

    def test_choice_inside_unrelated_clauses(self):
        prog = "r(1). (r(X) :- X = 2) & r(3). r(4)."
        assert run(prog, "r(X)")[0] == ["X = 1", "X = 2", "X = 4"]


class TestHypotheses:
    def test_assumption_is_visible_in_body(self):
        assert run("", "(r(a)) => r(X)")[0] == ["X = a"]

    def test_most_recent_first_then_static(self):
        answers, stats = run("r(c).", "(r(a)) => (r(b)) => r(X)")
        assert answers == ["X = b", "X = a", "X = c"]
        assert stats.hypotheses_pushed == 2

    def test_assumption_is_scoped(self):
        assert run("", "((r(a)) => r(a)), r(a)")[0] == []

    def test_free_variable_of_assumption_is_shared(self):
        # X is quantified over the whole query, not inside the assumed clause
        assert run("q(b).", "(p(X) :- q(X)) => p(Y)")[0] == ["X = b, Y = b"]

    def test_assumed_choice(self):
        assert run("", "(p(a) & p(b)) => p(X)")[0] == ["X = a"]

    def test_context_restored_after_success_and_failure(self):
        for query in ["(r(a)) => r(X)", "(r(a)) => r(b)", "(r(a)) => (s) => r(X), s"]:
            solver = Solver(parse_program("r(c).").clauses)
            before = solver.program_length()
            list(solver.solve(parse_goal(query)))
            assert solver.program_length() == before
            assert solver.hypotheses() == []

    def test_context_restored_when_abandoned(self):
        solver = Solver([])
        gen = solver.solve(parse_goal("(r(a)) => (r(b)) => r(X), q(X)"))
        gen.close()
        gen = solver.solve(parse_goal("(r(a)) => (r(b)) => r(X)"))
        assert next(gen)
        gen.close()
        assert solver.program_length() == 0
        assert solver.bindings == {} and solver.trail == []

    def test_bindings_undone_between_runs(self):
        solver = Solver(parse_program("p(a). p(b).").clauses)
        first = list(solver.solve(parse_goal("p(X)")))
        second = list(solver.solve(parse_goal("p(X)")))
        assert [canonical_answer(a) for a in first] == [canonical_answer(a) for a in second]
        assert solver.bindings == {}


class TestLimits:
    def test_step_limit_is_not_failure(self):
        with pytest.raises(LimitExceeded) as info:
            solve(parse_program("loop :- loop.").clauses, parse_goal("loop"), limits=Limits(max_steps=1000))
        assert info.value.answers == []

    def test_depth_limit(self):
        with pytest.raises(LimitExceeded):
            solve(parse_program("n(s(X)) :- n(X).").clauses, parse_goal("n(Y)"), limits=Limits(max_depth=50))

    def test_partial_answers_kept(self):
        prog = parse_program("nat(z). nat(s(X)) :- nat(X).").clauses
        with pytest.raises(LimitExceeded) as info:
            solve(prog, parse_goal("nat(N)"), limits=Limits(max_steps=20))
        assert len(info.value.answers) >= 5

    def test_default_limits(self):
        assert Limits() == Limits(max_steps=1_000_000, max_depth=None)


class TestDeterminism:
    @pytest.mark.parametrize(
        "name, query",
        [("max.lw", "max(9,3,M)"), ("lists.lw", "uni([a,b],[b,c],Z)"), ("append.lw", "append(X,Y,[1,2,3])")],
    )
    def test_same_trace_twice(self, name, query):
        prog = program(name)
        runs = [traced(prog, query) for _ in range(2)]
        strip = lambda lines: [re.sub(r"_G\d+", "_", x) for x in lines]  # noqa: E731
        assert strip(runs[0][1]) == strip(runs[1][1])
        assert [canonical_answer(a) for a in runs[0][0]] == [canonical_answer(a) for a in runs[1][0]]
