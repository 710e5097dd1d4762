"""Rule-file parser and canonical printer.

Grammar (one clause per line, whitespace-insensitive):

    clause   := atom ":-" atom ("," atom)* "."
    atom     := name "(" term ("," term)* ")"
    term     := VARIABLE | constant
    constant := NAME | QUOTED

``%`` begins a comment running to end of line.  Variables are
uppercase-initial identifiers; constants and predicates are
lowercase/digit/underscore-initial identifiers or double-quoted strings
(quoting admits arbitrary knowledge-graph symbols such as
``"/film/actor"``).  Only Horn clauses are accepted; there are no
function symbols, no negation, no connectives beyond the implicit
body conjunction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .logic import (
    Atom,
    Constant,
    HornClause,
    LogicError,
    Term,
    Theory,
    Variable,
)


class ParseError(LogicError):
    """Syntax or well-formedness error, located by line and column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_BARE_NAME = re.compile(r"[a-z0-9_][A-Za-z0-9_/\-]*")
_VARIABLE = re.compile(r"[A-Z][A-Za-z0-9_]*")
_BARE_SAFE = re.compile(r"[a-z0-9_][A-Za-z0-9_/\-]*\Z")


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # NAME | VAR | QUOTED | ( | ) | , | :- | .
    text: str
    column: int


def _tokenize(line: str, line_no: int) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch in " \t\r":
            i += 1
            continue
        if ch == "%":
            break
        col = i + 1
        if ch in "(),":
            tokens.append(_Token(ch, ch, col))
            i += 1
        elif ch == ".":
            tokens.append(_Token(".", ".", col))
            i += 1
        elif ch == ":":
            if line.startswith(":-", i):
                tokens.append(_Token(":-", ":-", col))
                i += 2
            else:
                raise ParseError("expected ':-'", line_no, col)
        elif ch == '"':
            j = i + 1
            parts: list[str] = []
            while True:
                if j >= n:
                    raise ParseError("unterminated quoted constant", line_no, col)
                c = line[j]
                if c == "\\":
                    if j + 1 >= n:
                        raise ParseError("dangling escape", line_no, j + 1)
                    parts.append(line[j + 1])
                    j += 2
                elif c == '"':
                    j += 1
                    break
                else:
                    parts.append(c)
                    j += 1
            tokens.append(_Token("QUOTED", "".join(parts), col))
            i = j
        else:
            m = _VARIABLE.match(line, i)
            if m:
                tokens.append(_Token("VAR", m.group(), col))
                i = m.end()
                continue
            m = _BARE_NAME.match(line, i)
            if m:
                tokens.append(_Token("NAME", m.group(), col))
                i = m.end()
                continue
            raise ParseError(f"unexpected character {ch!r}", line_no, col)
    return tokens


class _LineParser:
    def __init__(self, tokens: list[_Token], line_no: int, theory: Theory) -> None:
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.theory = theory

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, kind: str) -> _Token:
        tok = self.peek()
        if tok is None:
            last_col = self.tokens[-1].column if self.tokens else 1
            raise ParseError(f"expected {kind!r}, found end of line", self.line_no, last_col)
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text!r}", self.line_no, tok.column)
        self.pos += 1
        return tok

    def parse_clause(self) -> tuple[Atom, list[Atom]]:
        head = self.parse_atom()
        self.take(":-")
        body = [self.parse_atom()]
        while self.peek() is not None and self.peek().kind == ",":
            self.take(",")
            body.append(self.parse_atom())
        self.take(".")
        trailing = self.peek()
        if trailing is not None:
            raise ParseError(
                f"unexpected {trailing.text!r} after clause end", self.line_no, trailing.column
            )
        return head, body

    def parse_atom(self) -> Atom:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected atom, found end of line", self.line_no, 1)
        if tok.kind not in ("NAME", "QUOTED"):
            raise ParseError(f"expected predicate name, found {tok.text!r}", self.line_no, tok.column)
        self.pos += 1
        name_tok = tok
        self.take("(")
        terms = [self.parse_term()]
        while self.peek() is not None and self.peek().kind == ",":
            self.take(",")
            terms.append(self.parse_term())
        self.take(")")
        try:
            pid = self.theory.predicate(name_tok.text, len(terms))
        except LogicError as exc:
            raise ParseError(str(exc), self.line_no, name_tok.column) from exc
        return Atom(pid, tuple(terms))

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise ParseError("expected term, found end of line", self.line_no, 1)
        self.pos += 1
        if tok.kind == "VAR":
            return Variable(self.theory.variable(tok.text))
        if tok.kind in ("NAME", "QUOTED"):
            return Constant(self.theory.constant(tok.text))
        raise ParseError(f"expected term, found {tok.text!r}", self.line_no, tok.column)


def parse_theory(
    text: str,
    theory: Optional[Theory] = None,
    *,
    range_restricted: bool = True,
) -> Theory:
    """Parse a rule file into a :class:`Theory`.

    One clause per line, ``rule_id`` order equals file order, interning is
    stable across repeated names.  With ``range_restricted`` (the default)
    every head variable must also occur in the body, which guarantees that
    ground bodies produce ground heads.
    """
    theory = theory if theory is not None else Theory()
    for line_no, line in enumerate(text.splitlines(), start=1):
        tokens = _tokenize(line, line_no)
        if not tokens:
            continue
        parser = _LineParser(tokens, line_no, theory)
        head, body = parser.parse_clause()
        if range_restricted:
            body_vars = {vid for atom in body for vid in atom.variables()}
            for vid in head.variables():
                if vid not in body_vars:
                    name = theory.variables.name_of(vid)
                    raise ParseError(
                        f"head variable {name} does not occur in the body",
                        line_no,
                        tokens[0].column,
                    )
        theory.add_clause(head, body)
    return theory


def _format_name(name: str) -> str:
    if _BARE_SAFE.match(name):
        return name
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def format_atom(theory: Theory, atom: Atom) -> str:
    parts = []
    for term in atom.args:
        if isinstance(term, Constant):
            parts.append(_format_name(theory.constants.name_of(term.id)))
        else:
            parts.append(theory.variables.name_of(term.id))
    pred = _format_name(theory.predicates.name_of(atom.predicate))
    return f"{pred}({','.join(parts)})"


def format_ground(theory: Theory, ground: tuple[int, ...]) -> str:
    """Canonical text form of a compact ground atom, e.g. ``locIn(it,eu)``."""
    pred = _format_name(theory.predicates.name_of(ground[0]))
    args = ",".join(_format_name(theory.constants.name_of(c)) for c in ground[1:])
    return f"{pred}({args})"


def format_clause(theory: Theory, clause: HornClause) -> str:
    body = ", ".join(format_atom(theory, atom) for atom in clause.body)
    return f"{format_atom(theory, clause.head)} :- {body}."


def format_theory(theory: Theory) -> str:
    """Canonical rule-file text; ``parse . format . parse`` is a fixpoint."""
    return "\n".join(format_clause(theory, clause) for clause in theory.clauses) + (
        "\n" if theory.clauses else ""
    )
