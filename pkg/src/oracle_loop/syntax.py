"""Propositional formula trees: parsing, rendering, evaluation.

The concrete syntax is line-oriented ASCII:

    f := var | ~f | (f) | f & f | f "|" f | f -> f | f <-> f

with precedence ~ > & > | > -> > <->.  `&`, `|` and `<->` associate to
the left, `->` to the right.  Variable names match
``[A-Za-z_][A-Za-z0-9_]*``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Mapping


class ParseError(ValueError):
    """Malformed formula or KB text; positions are 1-based."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Formula:
    """Base class for immutable propositional formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return formula_to_text(self)


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


def conjunction(formulas: list[Formula]) -> Formula:
    """Left-nested conjunction of one or more formulas."""
    if not formulas:
        raise ValueError("empty conjunction")
    acc = formulas[0]
    for f in formulas[1:]:
        acc = And(acc, f)
    return acc


# ---------------------------------------------------------------------------
# Tokenizer


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><->|->|[~&|()])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'name' | 'op' | 'end'
    text: str
    line: int
    column: int


def _tokenize(text: str, line: int) -> Iterator[_Token]:
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if m.lastgroup == "name":
            yield _Token("name", m.group(), line, m.start() + 1)
        elif m.lastgroup == "op":
            yield _Token("op", m.group(), line, m.start() + 1)
        pos = m.end()
    yield _Token("end", "", line, len(text) + 1)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self._tokens = tokens
        self._i = 0

    def peek(self) -> _Token:
        return self._tokens[self._i]

    def next(self) -> _Token:
        tok = self._tokens[self._i]
        if tok.kind != "end":
            self._i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            self.next()
            return True
        return False

    def parse(self) -> Formula:
        f = self._iff()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.column)
        return f

    def _iff(self) -> Formula:
        left = self._implies()
        while self.accept("<->"):
            left = Iff(left, self._implies())
        return left

    def _implies(self) -> Formula:
        left = self._or()
        if self.accept("->"):
            return Implies(left, self._implies())
        return left

    def _or(self) -> Formula:
        left = self._and()
        while self.accept("|"):
            left = Or(left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._unary()
        while self.accept("&"):
            left = And(left, self._unary())
        return left

    def _unary(self) -> Formula:
        tok = self.next()
        if tok.kind == "op" and tok.text == "~":
            return Not(self._unary())
        if tok.kind == "op" and tok.text == "(":
            inner = self._iff()
            closing = self.next()
            if not (closing.kind == "op" and closing.text == ")"):
                raise ParseError("expected ')'", closing.line, closing.column)
            return inner
        if tok.kind == "name":
            return Var(tok.text)
        what = repr(tok.text) if tok.text else "end of input"
        raise ParseError(f"expected formula, got {what}", tok.line, tok.column)


def parse_formula(text: str, line: int = 1) -> Formula:
    """Parse one formula; `line` seeds error positions for embedded text."""
    return _Parser(list(_tokenize(text, line))).parse()


# ---------------------------------------------------------------------------
# Rendering

_PRECEDENCE: dict[type, int] = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Var: 6}

# (symbol, parenthesize-left-below, parenthesize-right-below-or-equal)
_BINARY: dict[type, tuple[str, int, int]] = {
    # left-associative: a & b & c == (a & b) & c, so a right child at the
    # same level needs parentheses to survive a round trip
    And: ("&", 4, 4),
    Or: ("|", 3, 3),
    Iff: ("<->", 1, 1),
    # right-associative
    Implies: ("->", 3, 1),
}


def formula_to_text(f: Formula) -> str:
    """Render with the fewest parentheses that reparse to an equal tree."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        inner = formula_to_text(f.operand)
        if _PRECEDENCE[type(f.operand)] < 5:
            inner = f"({inner})"
        return "~" + inner
    symbol, left_min, right_max = _BINARY[type(f)]
    left = formula_to_text(f.left)
    if _PRECEDENCE[type(f.left)] < left_min:
        left = f"({left})"
    right = formula_to_text(f.right)
    if _PRECEDENCE[type(f.right)] <= right_max:
        right = f"({right})"
    return f"{left} {symbol} {right}"


# ---------------------------------------------------------------------------
# Semantics

def formula_variables(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, Not):
            stack.append(node.operand)
        else:
            stack.append(node.left)  # type: ignore[attr-defined]
            stack.append(node.right)  # type: ignore[attr-defined]
    return frozenset(out)


def evaluate_formula(f: Formula, assignment: Mapping[str, bool]) -> bool:
    """Truth value under `assignment`; unmapped variables count as false."""
    if isinstance(f, Var):
        return bool(assignment.get(f.name, False))
    if isinstance(f, Not):
        return not evaluate_formula(f.operand, assignment)
    if isinstance(f, And):
        return evaluate_formula(f.left, assignment) and evaluate_formula(f.right, assignment)
    if isinstance(f, Or):
        return evaluate_formula(f.left, assignment) or evaluate_formula(f.right, assignment)
    if isinstance(f, Implies):
        return (not evaluate_formula(f.left, assignment)) or evaluate_formula(f.right, assignment)
    if isinstance(f, Iff):
        return evaluate_formula(f.left, assignment) == evaluate_formula(f.right, assignment)
    raise TypeError(f"not a formula: {f!r}")
