"""Formula syntax: AST, parser, printer, and traversal.

The surface grammar (whitespace-insensitive between tokens)::

    formula := impl
    impl    := or ( "->" impl )?                        right-associative
    or      := and ( "|" and )*                         left-associative
    and     := unary ( "&" unary )*                     left-associative
    unary   := "~" unary | "EX" unary | "AX" unary
             | "E" "[" formula ("U"|"R") formula "]"
             | "A" "[" formula ("U"|"R") formula "]"
             | "(" formula ")" | "false" | "true" | atom
    atom    := [a-z][A-Za-z0-9_]*

``~f`` is sugar for ``f -> false`` and ``true`` for ``false -> false``;
both desugar at parse time, so the AST has no negation or truth node.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

__all__ = [
    "Formula",
    "Atom",
    "Bottom",
    "And",
    "Or",
    "Implies",
    "ExistsNext",
    "ForallNext",
    "ExistsUntil",
    "ExistsRelease",
    "ForallUntil",
    "ForallRelease",
    "BOTTOM",
    "TRUE",
    "negation",
    "ParseError",
    "parse_formula",
    "print_formula",
    "subformulas",
    "children",
    "atoms_of",
]

ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


class Formula:
    """Base class for formula nodes; concrete nodes are frozen dataclasses."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ExistsNext(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class ForallNext(Formula):
    sub: Formula


@dataclass(frozen=True, slots=True)
class ExistsUntil(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ExistsRelease(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ForallUntil(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ForallRelease(Formula):
    left: Formula
    right: Formula


BOTTOM = Bottom()
TRUE = Implies(BOTTOM, BOTTOM)


def negation(f: Formula) -> Formula:
    return Implies(f, BOTTOM)


def children(f: Formula) -> tuple[Formula, ...]:
    match f:
        case Atom() | Bottom():
            return ()
        case ExistsNext(sub) | ForallNext(sub):
            return (sub,)
        case (
            And(l, r)
            | Or(l, r)
            | Implies(l, r)
            | ExistsUntil(l, r)
            | ExistsRelease(l, r)
            | ForallUntil(l, r)
            | ForallRelease(l, r)
        ):
            return (l, r)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula) -> list[Formula]:
    """All distinct subformulas in post order; the last element is ``f``."""
    seen: set[Formula] = set()
    out: list[Formula] = []

    def walk(g: Formula) -> None:
        if g in seen:
            return
        for child in children(g):
            walk(child)
        seen.add(g)
        out.append(g)

    walk(f)
    return out


def atoms_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<ARROW>->)
  | (?P<WORD>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<PUNCT>[~&|()\[\]])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"E", "A", "U", "R", "EX", "AX", "false", "true"}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    pos: int


class ParseError(ValueError):
    """Syntax error with character position and expected-token hints."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        self.position = position
        self.expected = expected
        hint = f" (expected {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at position {position}{hint}")


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "WORD":
            word = m.group()
            if word in _KEYWORDS:
                tokens.append(_Token(word, word, pos))
            elif ATOM_RE.match(word):
                tokens.append(_Token("ATOM", word, pos))
            else:
                raise ParseError(
                    f"invalid name {word!r}",
                    pos,
                    ("atom starting with a lowercase letter", "EX", "AX", "E", "A"),
                )
        elif m.lastgroup in ("ARROW", "PUNCT"):
            tokens.append(_Token(m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(_Token("EOF", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# Parser

_FORMULA_START = ("~", "EX", "AX", "E", "A", "(", "false", "true", "atom")


def _describe(tok: _Token) -> str:
    return "end of input" if tok.kind == "EOF" else repr(tok.text)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def cur(self) -> _Token:
        return self.tokens[self.i]

    def eat(self, kind: str) -> _Token:
        tok = self.cur
        if tok.kind != kind:
            raise ParseError(f"unexpected {_describe(tok)}", tok.pos, (kind,))
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.cur.kind == "->":
            self.eat("->")
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.cur.kind == "|":
            self.eat("|")
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.cur.kind == "&":
            self.eat("&")
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.cur
        match tok.kind:
            case "~":
                self.eat("~")
                return negation(self.unary())
            case "EX":
                self.eat("EX")
                return ExistsNext(self.unary())
            case "AX":
                self.eat("AX")
                return ForallNext(self.unary())
            case "E":
                return self.bracketed(ExistsUntil, ExistsRelease)
            case "A":
                return self.bracketed(ForallUntil, ForallRelease)
            case "(":
                self.eat("(")
                f = self.formula()
                self.eat(")")
                return f
            case "false":
                self.eat("false")
                return BOTTOM
            case "true":
                self.eat("true")
                return TRUE
            case "ATOM":
                self.eat("ATOM")
                return Atom(tok.text)
        raise ParseError(f"unexpected {_describe(tok)}", tok.pos, _FORMULA_START)

    def bracketed(self, until: type, release: type) -> Formula:
        self.eat(self.cur.kind)  # E or A
        self.eat("[")
        left = self.formula()
        tok = self.cur
        if tok.kind == "U":
            ctor = until
        elif tok.kind == "R":
            ctor = release
        else:
            raise ParseError(f"unexpected {_describe(tok)}", tok.pos, ("U", "R"))
        self.eat(tok.kind)
        right = self.formula()
        self.eat("]")
        return ctor(left, right)


def parse_formula(text: str) -> Formula:
    """Parse the surface syntax into an AST, or raise :class:`ParseError`."""
    tokens = _tokenize(text)
    if tokens[0].kind == "EOF":
        raise ParseError("empty input", 0, _FORMULA_START)
    parser = _Parser(tokens)
    f = parser.formula()
    parser.eat("EOF")
    return f


# ---------------------------------------------------------------------------
# Printer

# precedence levels: 0 = implication, 1 = disjunction, 2 = conjunction, 3 = unary
def _fmt(f: Formula, level: int) -> str:
    match f:
        case Atom(name):
            return name
        case Bottom():
            return "false"
        case And(l, r):
            s = f"{_fmt(l, 2)} & {_fmt(r, 3)}"
            return f"({s})" if level > 2 else s
        case Or(l, r):
            s = f"{_fmt(l, 1)} | {_fmt(r, 2)}"
            return f"({s})" if level > 1 else s
        case Implies(l, r):
            s = f"{_fmt(l, 1)} -> {_fmt(r, 0)}"
            return f"({s})" if level > 0 else s
        case ExistsNext(sub):
            return f"EX {_fmt(sub, 3)}"
        case ForallNext(sub):
            return f"AX {_fmt(sub, 3)}"
        case ExistsUntil(l, r):
            return f"E[{_fmt(l, 0)} U {_fmt(r, 0)}]"
        case ExistsRelease(l, r):
            return f"E[{_fmt(l, 0)} R {_fmt(r, 0)}]"
        case ForallUntil(l, r):
            return f"A[{_fmt(l, 0)} U {_fmt(r, 0)}]"
        case ForallRelease(l, r):
            return f"A[{_fmt(l, 0)} R {_fmt(r, 0)}]"
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    """Canonical text form; re-parses to a structurally identical AST."""
    return _fmt(f, 0)
