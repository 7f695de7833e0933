"""Arithmetic expressions in ``s``, ``t``, ``u`` for user-supplied nonlinearities.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := number | 's' | 't' | 'u' | func '(' expr ')' | '(' expr ')' | '-' factor
    func   := sin | cos | atan | tanh | abs | exp

Evaluation is vectorized over numpy arrays.  Printing is fully parenthesized,
so ``parse(str(e))`` reproduces ``e``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .exceptions import ParseError

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "atan": np.arctan,
    "tanh": np.tanh,
    "abs": np.abs,
    "exp": np.exp,
}
VARIABLES = ("s", "t", "u")

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_]\w*")


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        return repr(float(self.value))

    def eval(self, env):
        return self.value


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name

    def eval(self, env):
        return env[self.name]


@dataclass(frozen=True)
class Neg:
    arg: object

    def __str__(self):
        return f"(-{self.arg})"

    def eval(self, env):
        return -self.arg.eval(env)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"({self.left}{self.op}{self.right})"

    def eval(self, env):
        x, y = self.left.eval(env), self.right.eval(env)
        if self.op == "+":
            return x + y
        if self.op == "-":
            return x - y
        if self.op == "*":
            return x * y
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.divide(x, y)


@dataclass(frozen=True)
class Call:
    func: str
    arg: object

    def __str__(self):
        return f"{self.func}({self.arg})"

    def eval(self, env):
        with np.errstate(over="ignore"):
            return FUNCTIONS[self.func](self.arg.eval(env))


class _Parser:
    def __init__(self, source):
        self.src = source
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._skip()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def _fail(self, what):
        found = self._peek() or "end of input"
        raise ParseError(f"expected {what}, found {found!r}", self.pos)

    def _expect(self, ch):
        if self._peek() != ch:
            self._fail(repr(ch))
        self.pos += 1

    def parse(self):
        node = self.expr()
        if self._peek():
            self._fail("operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self._peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self._peek() in ("*", "/"):
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        ch = self._peek()
        if ch == "-":
            self.pos += 1
            return Neg(self.factor())
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self._expect(")")
            return node
        m = _NUMBER.match(self.src, self.pos)
        if m:
            self.pos = m.end()
            return Num(float(m.group()))
        m = _NAME.match(self.src, self.pos)
        if m:
            name = m.group()
            if name in VARIABLES:
                self.pos = m.end()
                return Var(name)
            if name in FUNCTIONS:
                self.pos = m.end()
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(name, arg)
            raise ParseError(f"unknown name {name!r}", self.pos)
        self._fail("number, variable, function or '('")


@dataclass(frozen=True)
class PExpression:
    source: str
    ast: object

    def __str__(self):
        return str(self.ast)

    def __call__(self, s, t, u):
        s, t, u = (np.asarray(x, dtype=float) for x in (s, t, u))
        out = self.ast.eval({"s": s, "t": t, "u": u})
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(s, t, u).shape).copy()


def parse_p(source: str) -> PExpression:
    if not isinstance(source, str) or not source.strip():
        raise ParseError("empty expression", 0)
    return PExpression(source, _Parser(source).parse())
