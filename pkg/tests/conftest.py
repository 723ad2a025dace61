import pytest
from hypothesis import settings

from linweb import corpus
from linweb.engine import format_answer, solve
from linweb.modules import ModuleRegistry
from linweb.syntax import parse_goal, parse_program

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# criterion lines collected by test_acceptance, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def program(name):
    return parse_program(corpus.text(name)).clauses


def run(prog, query, mode="all", **kw):
    """Answers as display strings."""
    if isinstance(prog, str):
        prog = parse_program(prog).clauses
    answers, stats = solve(prog, parse_goal(query), mode, **kw)
    return [format_answer(a) for a in answers], stats


@pytest.fixture
def max_program():
    return program("max.lw")


@pytest.fixture
def append_program():
    return program("append.lw")


@pytest.fixture
def lists_registry():
    return ModuleRegistry([("www.dau.com/lists", str(corpus.path("lists.lw")))], http=False, search_path=[])
