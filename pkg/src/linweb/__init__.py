"""Horn-clause logic programming with committed-choice ``&`` clauses and
url-addressed clause modules."""
from .engine import LimitExceeded, Limits, Solver, StatCounters, canonical_answer, format_answer, solve
from .modules import ModuleRegistry, elaborate_load, load_module
from .oracle import differential_check, solve_nondet
from .syntax import ParseError, parse_clause, parse_goal, parse_program, pretty, pretty_program
from .terms import apply, unify

__version__ = "0.1.0"
