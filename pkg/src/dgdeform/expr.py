"""Tokenizer, expression grammar and a small evaluator.

Grammar (one expression, no implicit multiplication)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '&' | '@') unary)*
    unary := ('-' | '+') unary | power
    power := atom ('^' INT)?
    atom  := NUMBER | NAME | NAME '(' expr (',' expr)* ')' | NAME '[' INT ']' | '(' expr ')'

``NUMBER`` is ``p`` or ``p/q``, optionally followed directly by ``i``
(``3/2i`` is three halves times i).  ``&`` is the deformed product and
``@`` the tensor product; their meaning is supplied by the environment.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, NamedTuple

from .errors import DeformError


class ParseError(DeformError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line, self.col, self.expected, self.found = line, col, expected, found
        msg = f"line {line}, col {col}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class Token(NamedTuple):
    kind: str
    text: str
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?(?:i(?![A-Za-z0-9_']))?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<arrow>->)
  | (?P<op>[-+*^&@(),\[\]:=;])
    """,
    re.VERBOSE,
)


def tokenize(text: str, line: int = 1, col0: int = 1) -> list[Token]:
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(line, col0 + pos, "a token", text[pos])
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), col0 + pos))
        pos = m.end()
    out.append(Token("end", "", col0 + len(text)))
    return out


# AST -------------------------------------------------------------------
class Num(NamedTuple):
    value: Fraction
    imaginary: bool
    col: int


class Name(NamedTuple):
    id: str
    col: int


class BinOp(NamedTuple):
    op: str
    left: Any
    right: Any
    col: int


class Neg(NamedTuple):
    operand: Any
    col: int


class Pow(NamedTuple):
    base: Any
    exponent: int
    col: int


class Call(NamedTuple):
    func: str
    args: tuple
    col: int


class Index(NamedTuple):
    name: str
    index: int
    col: int


class Parser:
    """Recursive-descent parser over a token list; reusable by the script layer."""

    def __init__(self, tokens: list[Token], line: int = 1):
        self.toks = tokens
        self.i = 0
        self.line = line

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, expected: str):
        t = self.tok
        raise ParseError(self.line, t.col, expected, t.text or "end of line")

    def accept(self, text: str) -> bool:
        if self.tok.text == text and self.tok.kind in ("op", "arrow", "name"):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.tok.text != text:
            self.error(repr(text))
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.tok.kind != kind:
            self.error(what)
        return self.advance()

    def expect_int(self) -> int:
        neg = self.accept("-")
        t = self.tok
        if t.kind != "num" or not t.text.isdigit():
            self.error("an integer")
        self.advance()
        return -int(t.text) if neg else int(t.text)

    def at_end(self) -> bool:
        return self.tok.kind == "end"

    # expressions
    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            t = self.advance()
            node = BinOp(t.text, node, self.term(), t.col)
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "&", "@") and self.tok.kind == "op":
            t = self.advance()
            node = BinOp(t.text, node, self.unary(), t.col)
        return node

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.text == "-":
            self.advance()
            return Neg(self.unary(), t.col)
        if t.kind == "op" and t.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        node = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            t = self.advance()
            e = self.tok
            if e.kind != "num" or not e.text.isdigit():
                self.error("a non-negative integer exponent")
            self.advance()
            node = Pow(node, int(e.text), t.col)
        return node

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            text = t.text
            imag = text.endswith("i")
            if imag:
                text = text[:-1]
            return Num(Fraction(text), imag, t.col)
        if t.kind == "name":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                self.advance()
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                return Call(t.text, tuple(args), t.col)
            if self.tok.kind == "op" and self.tok.text == "[":
                self.advance()
                idx = self.expect_int()
                self.expect("]")
                return Index(t.text, idx, t.col)
            return Name(t.text, t.col)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.error("an expression")


def parse_expression(text: str, line: int = 1) -> Any:
    p = Parser(tokenize(text, line), line)
    node = p.expr()
    if not p.at_end():
        p.error("end of expression")
    return node


class Environment:
    """Name resolution for :func:`evaluate`; subclasses add generators, maps, ..."""

    line = 1

    def lookup(self, name: str, col: int):
        from .scalar import EPS, HBAR, I

        builtin = {"i": I, "h": HBAR, "e": EPS}
        if name in builtin:
            return builtin[name]
        raise ParseError(self.line, col, "a known name", name)

    def call(self, func: str, args: list, col: int):
        raise ParseError(self.line, col, "a known function", func)

    def index(self, name: str, idx: int, col: int):
        raise ParseError(self.line, col, "an indexable name", name)

    def binop(self, op: str, a, b, col: int):
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        raise ParseError(self.line, col, "a supported operator", op)


def evaluate(node, env: Environment):
    from .scalar import I, Scalar

    if isinstance(node, Num):
        s = Scalar.coerce(node.value)
        return s * I if node.imaginary else s
    if isinstance(node, Name):
        return env.lookup(node.id, node.col)
    if isinstance(node, BinOp):
        return env.binop(node.op, evaluate(node.left, env), evaluate(node.right, env), node.col)
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Pow):
        base = evaluate(node.base, env)
        return base ** node.exponent
    if isinstance(node, Call):
        return env.call(node.func, [evaluate(a, env) for a in node.args], node.col)
    if isinstance(node, Index):
        return env.index(node.name, node.index, node.col)
    raise TypeError(f"unknown node {node!r}")


def parse_scalar(text: str):
    from .scalar import Scalar

    value = evaluate(parse_expression(text), Environment())
    return Scalar.coerce(value)


class ElementEnvironment(Environment):
    """Generators of a context as names; scalars promote to elements."""

    def __init__(self, ctx):
        self.ctx = ctx

    def lookup(self, name: str, col: int):
        if name in self.ctx.index:
            return self.ctx.gen(name)
        return super().lookup(name, col)


def parse_element(text: str, ctx):
    from .graded import Element
    from .scalar import Scalar

    value = evaluate(parse_expression(text), ElementEnvironment(ctx))
    if isinstance(value, Element):
        return value
    return ctx.scalar(Scalar.coerce(value))
