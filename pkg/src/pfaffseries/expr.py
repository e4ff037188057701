"""Recursive-descent parser for right-hand-side expressions.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``*``; implicit multiplication is rejected)::

    expr     := term (('+' | '-') term)*
    term     := unary ('*' unary)*
    unary    := '-' unary | power
    power    := atom ('^' uint)?
    atom     := rational | var | '(' expr ')'
    rational := int ('/' uint)?
    var      := 'x' uint | 'y' uint
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .system import Poly


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at column {position + 1}")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "var", "op", "end"
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    out: list[Token] = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            out.append(Token("int", src[i:j], i))
            i = j
        elif c in "xy":
            j = i + 1
            while j < len(src) and src[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError(f"variable '{c}' needs an index", i)
            out.append(Token("var", src[i:j], i))
            i = j
        elif c in "+-*/^()":
            out.append(Token("op", c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    out.append(Token("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, m: int, n: int):
        from .system import Poly

        self.Poly = Poly
        self.m, self.n = m, n
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.pos)
        return self.take()

    def parse(self) -> Poly:
        p = self.expr()
        if self.tok.kind != "end":
            t = self.tok
            hint = " (implicit multiplication is not allowed)" if t.kind in ("int", "var") or t.text == "(" else ""
            raise ParseError(f"unexpected {t.text!r}{hint}", t.pos)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.at("+") or self.at("-"):
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.at("*"):
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Poly:
        if self.at("-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.at("^"):
            self.take()
            t = self.tok
            if t.kind != "int":
                raise ParseError("exponent must be a non-negative integer", t.pos)
            self.take()
            return base ** int(t.text)
        return base

    def atom(self) -> Poly:
        t = self.tok
        if t.kind == "int":
            self.take()
            value = Fraction(int(t.text))
            if self.at("/"):
                self.take()
                d = self.tok
                if d.kind != "int":
                    raise ParseError("denominator must be an unsigned integer", d.pos)
                self.take()
                if int(d.text) == 0:
                    raise ParseError("zero denominator", d.pos)
                value /= int(d.text)
            return self.Poly.constant(value, self.m, self.n)
        if t.kind == "var":
            self.take()
            idx = int(t.text[1:])
            limit = self.m if t.text[0] == "x" else self.n
            if not 1 <= idx <= limit:
                raise ParseError(f"variable {t.text} out of range ({t.text[0]}1..{t.text[0]}{limit})", t.pos)
            if t.text[0] == "x":
                return self.Poly.x(idx, self.m, self.n)
            return self.Poly.y(idx, self.m, self.n)
        if self.at("("):
            self.take()
            p = self.expr()
            self.expect(")")
            return p
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def parse_expression(text: str, m: int, n: int) -> Poly:
    return _Parser(text, m, n).parse()
