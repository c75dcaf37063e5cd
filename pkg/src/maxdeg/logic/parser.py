"""Recursive-descent parser for first-order sentences about graphs.

Grammar, loosest binding first::

    formula := ("exists" | "forall") var "." formula
             | implication
    implication := disjunction ["->" formula]          (right associative)
    disjunction := conjunction {"|" conjunction}
    conjunction := unary {"&" unary}
    unary := "!" unary | "(" formula ")" | atom | quantified
    atom := "E(" var "," var ")" | var "=" var | "deg(" var ")" op int

A quantifier reaches as far right as possible, including when it appears as
an operand of a connective.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import And, Deg, Edge, Eq, Exists, Forall, Formula, Implies, Not, Or, free_vars

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<ge>>=)|(?P<le><=)|(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<sym>[().,&|!=]))"
)
_VAR = re.compile(r"[a-z][a-z0-9]*\Z")
_KEYWORDS = {"exists", "forall"}


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.message = message
        self.pos = pos


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    i = 0
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            break
        m = _TOKEN.match(text, i)
        if m is None or m.end() == i:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        tok_text = m.group(kind)
        out.append(_Tok(kind, tok_text, m.start(kind)))
        i = m.end()
    out.append(_Tok("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, ahead: int = 1) -> _Tok:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def take(self) -> _Tok:
        tok = self.cur
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        if self.cur.text != text or self.cur.kind == "end":
            raise ParseError(f"expected {text!r}, found {self.cur.text or 'end of input'!r}", self.cur.pos)
        return self.take()

    def var(self) -> str:
        tok = self.cur
        if tok.kind != "name" or not _VAR.match(tok.text) or tok.text in _KEYWORDS:
            raise ParseError(f"expected a variable, found {tok.text or 'end of input'!r}", tok.pos)
        if tok.text == "deg" and self.peek().text == "(":
            raise ParseError("'deg' cannot be used as a variable here", tok.pos)
        self.take()
        return tok.text

    # grammar

    def formula(self) -> Formula:
        if self.cur.kind == "name" and self.cur.text in _KEYWORDS:
            return self.quantified()
        left = self.disjunction()
        if self.cur.kind == "arrow":
            self.take()
            return Implies(left, self.formula())
        return left

    def quantified(self) -> Formula:
        kw = self.take().text
        name = self.var()
        self.expect(".")
        body = self.formula()
        return Exists(name, body) if kw == "exists" else Forall(name, body)

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.cur.text == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.cur.text == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.cur
        if tok.text == "!":
            self.take()
            return Not(self.unary())
        if tok.text == "(":
            self.take()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "name" and tok.text in _KEYWORDS:
            return self.quantified()
        if tok.kind == "name" and tok.text == "E" and self.peek().text == "(":
            self.take()
            self.expect("(")
            x = self.var()
            self.expect(",")
            y = self.var()
            self.expect(")")
            return Edge(x, y)
        if tok.kind == "name" and tok.text == "deg" and self.peek().text == "(":
            self.take()
            self.expect("(")
            x = self.var()
            self.expect(")")
            op_tok = self.cur
            if op_tok.kind == "ge":
                op = ">="
            elif op_tok.kind == "le":
                op = "<="
            elif op_tok.text == "=":
                op = "="
            else:
                raise ParseError("expected '=', '>=' or '<=' after deg(...)", op_tok.pos)
            self.take()
            num = self.cur
            if num.kind != "num":
                raise ParseError("expected a non-negative integer", num.pos)
            self.take()
            return Deg(x, op, int(num.text))
        if tok.kind == "name":
            x = self.var()
            self.expect("=")
            y = self.var()
            return Eq(x, y)
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)


def parse_formula(text: str) -> Formula:
    """Parse a formula that may contain free variables."""
    p = _Parser(text)
    phi = p.formula()
    if p.cur.kind != "end":
        raise ParseError(f"unexpected {p.cur.text!r}", p.cur.pos)
    return phi


def parse(text: str) -> Formula:
    """Parse a sentence; free variables are a :class:`ParseError`."""
    phi = parse_formula(text)
    free = free_vars(phi)
    if free:
        names = ", ".join(sorted(free))
        raise ParseError(f"free variables in sentence: {names}", 0)
    return phi
