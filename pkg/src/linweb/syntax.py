"""Concrete syntax: tokenizer, recursive-descent parser, pretty-printer.

Program files (``.lw``)::

    program  ::= [ 'mod' '(' STRING ')' '.' ] { clause '.' }
    clause   ::= cimp { '&' cimp }                  right-associated choice
    cimp     ::= cprim [ ':-' goal ]
    cprim    ::= '(' clause ')' | atom
    goal     ::= STRING '=>' goal
               | '(' clause ')' '=>' goal
               | gprim [ ',' goal ]
    gprim    ::= '(' goal ')' | term [ cmp term ] | atom
    cmp      ::= '>=' | '>' | '=<' | '<' | '='
    term     ::= VAR | INT | atom | list
    atom     ::= NAME [ '(' term { ',' term } ')' ]
    list     ::= '[' ']' | '[' term { ',' term } [ '|' term ] ']'

``%`` starts a comment running to end of line. Identifiers starting with an
uppercase letter or ``_`` are variables; each clause unit is closed by
universal quantifiers over its variables and a goal by existentials.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

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
    SourceModule,
    formula_vars,
    is_builtin,
)
from .terms import NIL, Compound, Const, Int, Term, Var, walk

CMP_OPS = {">=": "ge", ">": "gt", "=<": "le", "<": "lt", "=": "="}
CMP_NAMES = {v: k for k, v in CMP_OPS.items()}


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected: FrozenSet[str] = frozenset(expected)
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += " (expected " + " or ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    kind: str  # VAR NAME QNAME INT STRING PUNCT END
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<int>-?[0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\["\\])*")
  | (?P<qname>'(?:[^'\\\n]|\\['\\])*')
  | (?P<punct>:-|=>|>=|=<|\[\]|[()\[\]|,.&<>=])
    """,
    re.VERBOSE,
)


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", r"\1", body)


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "string":
                tokens.append(Token("STRING", _unescape(s[1:-1]), line, col))
            elif kind == "qname":
                tokens.append(Token("NAME", _unescape(s[1:-1]), line, col))
            else:
                tokens.append(Token(kind.upper(), s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("END", "", line, pos - line_start + 1))
    return tokens


class _Backtrack(Exception):
    pass


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.scope: Dict[str, Var] = {}

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind == "PUNCT" and t.text == text

    def error(self, message: str, expected: Iterable[str] = ()) -> ParseError:
        t = self.tok
        return ParseError(message, t.line, t.column, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"unexpected {found!r}", [repr(text)])
        t = self.tok
        self.i += 1
        return t

    def var(self, name: str) -> Var:
        if name == "_":
            return Var("_")
        v = self.scope.get(name)
        if v is None:
            v = self.scope[name] = Var(name)
        return v

    # -- terms

    def term(self) -> Term:
        t = self.tok
        if t.kind == "VAR":
            self.i += 1
            return self.var(t.text)
        if t.kind == "INT":
            self.i += 1
            return Int(int(t.text))
        if t.kind == "NAME":
            return self.atom()
        if t.kind == "PUNCT" and t.text == "[]":
            self.i += 1
            return NIL
        if self.at("["):
            return self.list_term()
        raise self.error(f"unexpected {t.text or 'end of input'!r}", ["term"])

    def atom(self) -> Term:
        t = self.tok
        if t.kind != "NAME":
            raise self.error(f"unexpected {t.text or 'end of input'!r}", ["atom"])
        self.i += 1
        if not self.at("("):
            return Const(t.text)
        self.i += 1
        args = [self.term()]
        while self.at(","):
            self.i += 1
            args.append(self.term())
        self.expect(")")
        return Compound(t.text, tuple(args))

    def list_term(self) -> Term:
        self.expect("[")
        if self.at("]"):
            self.i += 1
            return NIL
        items = [self.term()]
        while self.at(","):
            self.i += 1
            items.append(self.term())
        tail: Term = NIL
        if self.at("|"):
            self.i += 1
            tail = self.term()
        self.expect("]")
        for item in reversed(items):
            tail = Compound("cons", (item, tail))
        return tail

    # -- clauses

    def clause(self) -> DFormula:
        parts = [self.cimp()]
        while self.at("&"):
            self.i += 1
            parts.append(self.cimp())
        out = parts[-1]
        for d in reversed(parts[:-1]):
            out = DChoice(d, out)
        return out

    def cimp(self) -> DFormula:
        if self.at("("):
            self.i += 1
            head = self.clause()
            self.expect(")")
        else:
            t = self.tok
            atom = self.atom()
            if is_builtin(atom):
                raise ParseError(f"cannot define builtin {atom.functor}/2", t.line, t.column)
            head = DAtom(atom)
        if self.at(":-"):
            self.i += 1
            return DImp(self.goal(), head)
        return head

    # -- goals

    def goal(self) -> GFormula:
        parts = []
        while True:
            if self.tok.kind == "STRING":
                parts.append(self.load())
                break
            if self.at("("):
                assumed = self._try_assumption()
                if assumed is not None:
                    parts.append(assumed)
                    break
            parts.append(self.gprim())
            if not self.at(","):
                break
            self.i += 1
        out = parts[-1]
        for g in reversed(parts[:-1]):
            out = GAnd(g, out)
        return out

    def load(self) -> GFormula:
        t = self.tok
        self.i += 1
        if not t.text:
            raise ParseError("empty module url", t.line, t.column)
        self.expect("=>")
        return GLoad(t.text, self.goal())

    def _try_assumption(self) -> Optional[GFormula]:
        start = self.i
        scope = dict(self.scope)
        try:
            self.i += 1
            d = self.clause()
            self.expect(")")
            if not self.at("=>"):
                raise _Backtrack
        except (ParseError, _Backtrack):
            self.i = start
            self.scope = scope
            return None
        self.i += 1
        return GAssume(d, self.goal())

    def gprim(self) -> GFormula:
        if self.at("("):
            self.i += 1
            g = self.goal()
            self.expect(")")
            if self.at("=>"):
                raise self.error("only a clause or a quoted url may precede '=>'")
            return g
        t = self.tok
        left = self.term()
        if self.tok.kind == "PUNCT" and self.tok.text in CMP_OPS:
            op = CMP_OPS[self.tok.text]
            self.i += 1
            right = self.term()
            return GAtom(Compound(op, (left, right)), True)
        if not isinstance(left, (Const, Compound)):
            raise ParseError("goal must be an atom", t.line, t.column, ["atom"])
        return GAtom(left, is_builtin(left))


def _close_clause(d: DFormula) -> DFormula:
    for v in reversed(formula_vars(d)):
        d = DAll(v, d)
    return d


def _close_goal(g: GFormula) -> GFormula:
    for v in reversed(formula_vars(g)):
        g = GExists(v, g)
    return g


def _guarded(fn):
    def wrapper(text: str):
        try:
            return fn(text)
        except RecursionError:
            raise ParseError("input nested too deeply", 1, 1) from None

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_guarded
def parse_program(text: str) -> SourceModule:
    p = Parser(text)
    url: Optional[str] = None
    clauses: List[DFormula] = []
    while p.tok.kind != "END":
        t = p.tok
        if (
            t.kind == "NAME"
            and t.text == "mod"
            and p.i + 2 < len(p.toks)
            and p.toks[p.i + 1].text == "("
            and p.toks[p.i + 2].kind == "STRING"
        ):
            if url is not None:
                raise ParseError("duplicate mod declaration", t.line, t.column)
            if clauses:
                raise ParseError("mod declaration must precede all clauses", t.line, t.column)
            p.i += 2
            url = p.tok.text
            if not url:
                raise p.error("empty module url")
            p.i += 1
            p.expect(")")
            p.expect(".")
            continue
        p.scope = {}
        d = p.clause()
        p.expect(".")
        clauses.append(_close_clause(d))
    return SourceModule(url, clauses)


@_guarded
def parse_clause(text: str) -> DFormula:
    """Parse a single clause unit (trailing period optional)."""
    p = Parser(text)
    d = p.clause()
    if p.at("."):
        p.i += 1
    if p.tok.kind != "END":
        raise p.error(f"unexpected {p.tok.text!r}", ["end of input"])
    return _close_clause(d)


@_guarded
def parse_goal(text: str) -> GFormula:
    p = Parser(text)
    if p.tok.kind == "END" or p.at("."):
        raise p.error("empty goal", ["goal"])
    g = p.goal()
    if p.at("."):
        p.i += 1
    if p.tok.kind != "END":
        raise p.error(f"unexpected {p.tok.text!r}", ["',' or end of goal"])
    return _close_goal(g)


def goal_template(g: GFormula) -> List[Var]:
    """Variables of the leading existential prefix of a goal, outermost first."""
    out = []
    while isinstance(g, GExists):
        out.append(g.var)
        g = g.body
    return out


# -- pretty-printing ------------------------------------------------------------

_PLAIN_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _name(s: str) -> str:
    if _PLAIN_NAME.match(s):
        return s
    return "'" + s.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _string(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def pretty_term(t: Term, s=None) -> str:
    if s is not None:
        t = walk(t, s)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Const):
        return "[]" if t == NIL else _name(t.name)
    if t.functor == "cons" and len(t.args) == 2:
        items = []
        while isinstance(t, Compound) and t.functor == "cons" and len(t.args) == 2:
            items.append(pretty_term(t.args[0], s))
            t = t.args[1] if s is None else walk(t.args[1], s)
        out = "[" + ",".join(items)
        if t != NIL:
            out += "|" + pretty_term(t, s)
        return out + "]"
    return _name(t.functor) + "(" + ",".join(pretty_term(a, s) for a in t.args) + ")"


def _goal_atom(g: GAtom) -> str:
    a = g.atom
    if g.builtin and a.functor in CMP_NAMES:
        return f"{pretty_term(a.args[0])} {CMP_NAMES[a.functor]} {pretty_term(a.args[1])}"
    return pretty_term(a)


def pretty_goal(g: GFormula) -> str:
    while isinstance(g, GExists):
        g = g.body
    if isinstance(g, GAtom):
        return _goal_atom(g)
    if isinstance(g, GAnd):
        parts = []
        while isinstance(g, GAnd):
            left = _strip_exists(g.left)
            lhs = pretty_goal(left)
            if isinstance(left, (GAnd, GAssume, GLoad)):
                lhs = f"({lhs})"
            parts.append(lhs)
            g = _strip_exists(g.right)
        parts.append(pretty_goal(g))
        return ", ".join(parts)
    if isinstance(g, GAssume):
        return f"({pretty_clause(g.clause)}) => {pretty_goal(g.body)}"
    if isinstance(g, GLoad):
        return f"{_string(g.url)} => {pretty_goal(g.body)}"
    raise TypeError(f"not a goal: {g!r}")


def _strip_exists(g):
    while isinstance(g, GExists):
        g = g.body
    return g


def _strip_all(d):
    while isinstance(d, DAll):
        d = d.inner
    return d


def pretty_clause(d: DFormula, sep: str = " & ") -> str:
    d = _strip_all(d)
    if isinstance(d, DAtom):
        return pretty_term(d.atom)
    if isinstance(d, DImp):
        head = _strip_all(d.head)
        h = pretty_clause(head)
        if not isinstance(head, DAtom):
            h = f"({h})"
        return f"{h} :- {pretty_goal(d.body)}"
    if isinstance(d, DChoice):
        parts = []
        while isinstance(d, DChoice):
            parts.append(_strip_all(d.left))
            d = _strip_all(d.right)
        parts.append(d)
        out = []
        for i, part in enumerate(parts):
            text = pretty_clause(part, sep)
            if isinstance(part, DImp) or (isinstance(part, DChoice) and i < len(parts) - 1):
                text = f"({text})"
            out.append(text)
        return sep.join(out)
    raise TypeError(f"not a clause: {d!r}")


def pretty(x) -> str:
    """Canonical concrete syntax for a term, goal or clause."""
    if isinstance(x, (GAtom, GAnd, GAssume, GLoad, GExists)):
        return pretty_goal(x)
    if isinstance(x, (DAtom, DImp, DAll, DChoice)):
        return pretty_clause(x)
    return pretty_term(x)


def pretty_program(module: SourceModule) -> str:
    """Normalized program text: one unit per clause, ``&`` groups split over lines."""
    lines = []
    if module.url is not None:
        lines.append(f"mod({_string(module.url)}).")
    for d in module.clauses:
        lines.append(pretty_clause(d, sep=" &\n    ") + ".")
    return "\n".join(lines) + "\n"
