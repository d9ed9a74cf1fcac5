"""A tiny expression language for time-dependent coefficients.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | 't' | NAME '(' expr ')' | '(' expr ')'

'^' binds tighter than unary minus, so -a^b reads -(a^b).  The only
variable is t; the callable names are the fixed set sin, cos, exp, sh, ch,
th, sqrt and shc.  Parse errors carry the byte offset of the offending
token, evaluation errors the offset of the failing subexpression.

Parsed trees are immutable and shareable; evaluation is pure.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from . import backend
from .errors import (CoeffEvalError, CoeffParseError, DomainError,
                     RangeOverflowError)

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "sh": math.sinh,
    "ch": math.cosh,
    "th": math.tanh,
    "sqrt": math.sqrt,
    "shc": backend.shc,
}


@dataclass(frozen=True)
class Expr:
    pos: int = field(compare=False, kw_only=True, default=0)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    arg: Expr


_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])")


def _tokenize(src):
    out = []
    i, n = 0, len(src)
    while i < n:
        if src[i].isspace():
            i += 1
            continue
        m = _TOKEN.match(src, i)
        if m is None:
            raise CoeffParseError(f"unexpected character {src[i]!r}", i)
        kind = m.lastgroup
        out.append((kind, m.group(), i))
        i = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise CoeffParseError(f"expected {op!r}", pos)
        return self.next()

    def expr(self):
        node = self.term()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "+-":
                self.next()
                node = Binary(text, node, self.term(), pos=pos)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "*/":
                self.next()
                node = Binary(text, node, self.unary(), pos=pos)
            else:
                return node

    def unary(self):
        kind, text, pos = self.peek()
        if kind == "op" and text == "-":
            self.next()
            return Neg(self.unary(), pos=pos)
        return self.power()

    def power(self):
        node = self.atom()
        kind, text, pos = self.peek()
        if kind == "op" and text == "^":
            self.next()
            return Binary("^", node, self.unary(), pos=pos)
        return node

    def atom(self):
        kind, text, pos = self.next()
        if kind == "num":
            return Num(float(text), pos=pos)
        if kind == "name":
            if text == "t":
                return Var(pos=pos)
            if text not in FUNCTIONS:
                raise CoeffParseError(f"unknown identifier {text!r}", pos)
            self.expect_op("(")
            arg = self.expr()
            self.expect_op(")")
            return Call(text, arg, pos=pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        what = repr(text) if text else "end of input"
        raise CoeffParseError(f"expected a value, found {what}", pos)


def parse(src: str) -> Expr:
    p = _Parser(src)
    if p.peek()[0] == "end":
        raise CoeffParseError("empty expression", 0)
    node = p.expr()
    kind, text, pos = p.peek()
    if kind != "end":
        raise CoeffParseError(f"trailing input {text!r}", pos)
    return node


def evaluate(e: Expr, t: float) -> float:
    """Standard semantics; any non-finite intermediate is an error."""
    if not math.isfinite(t):
        raise CoeffEvalError("t must be finite")
    return _eval(e, float(t))


def _eval(e, t):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return t
    if isinstance(e, Neg):
        return -_eval(e.operand, t)
    if isinstance(e, Call):
        v = _eval(e.arg, t)
        try:
            out = FUNCTIONS[e.name](v)
        except (ValueError, OverflowError, DomainError,
                RangeOverflowError) as exc:
            raise CoeffEvalError(f"{e.name}: {exc}", e.pos) from None
        return _require_finite(out, e.name, e.pos)
    a = _eval(e.left, t)
    b = _eval(e.right, t)
    try:
        if e.op == "+":
            out = a + b
        elif e.op == "-":
            out = a - b
        elif e.op == "*":
            out = a * b
        elif e.op == "/":
            out = a / b
        else:
            out = math.pow(a, b)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise CoeffEvalError(f"{e.op}: {exc}", e.pos) from None
    return _require_finite(out, e.op, e.pos)


def _require_finite(v, what, pos):
    if not math.isfinite(v):
        raise CoeffEvalError(f"{what}: non-finite result", pos)
    return v


# precedence levels used by the printer; higher binds tighter
_LEVEL = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_source(e: Expr) -> str:
    """Canonical text form; parse(to_source(parse(s))) == parse(s)."""
    return _print(e, 0)


def _print(e, parent_level):
    if isinstance(e, Num):
        s = repr(e.value)
        return s[:-2] if s.endswith(".0") else s
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Call):
        return f"{e.name}({_print(e.arg, 0)})"
    if isinstance(e, Neg):
        s = "-" + _print(e.operand, _LEVEL["neg"])
        return f"({s})" if parent_level > _LEVEL["neg"] else s
    lvl = _LEVEL[e.op]
    if e.op == "^":
        # right-associative: parenthesize a non-atomic base
        left = _print(e.left, lvl + 1)
        right = _print(e.right, _LEVEL["neg"])
        s = f"{left}^{right}"
        return f"({s})" if parent_level > lvl else s
    # left-associative: an equal-level right child must keep its parens
    left = _print(e.left, lvl)
    right = _print(e.right, lvl + 1)
    s = f"{left} {e.op} {right}"
    return f"({s})" if parent_level > lvl else s


def as_function(src_or_expr):
    """Callable t -> value, labeled with the canonical source text."""
    e = parse(src_or_expr) if isinstance(src_or_expr, str) else src_or_expr

    def f(t):
        return evaluate(e, t)

    f.source = to_source(e)
    f.expr = e
    return f
