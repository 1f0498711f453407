"""Scalar expressions: parsing, printing, evaluation and exact derivatives.

Grammar::

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := ("-"|"+") factor | base ("^" ["-"] integer)?
    base   := number | ident | "(" expr ")" | func "(" expr ")"
    func   := sin | cos | tan | atan | exp | log | sqrt | neg

``pi`` is a predefined constant. Expressions compile to Python closures so
the same tree evaluates floats and (nested) dual numbers alike.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence

from . import dual
from .dual import Dual
from .errors import DomainError, ParseError, UnknownIdentifierError

FUNC_NAMES = ("sin", "cos", "tan", "atan", "exp", "log", "sqrt", "neg")
CONSTANTS = {"pi": math.pi}


# -- tree ------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float

    def source(self) -> str:
        return repr(float(self.value))

    def text(self) -> str:
        if self.value < 0 or math.copysign(1.0, self.value) < 0:
            return f"neg({-self.value!r})"
        return repr(float(self.value))


@dataclass(frozen=True)
class Var:
    index: int
    name: str

    def source(self) -> str:
        return f"v[{self.index}]"

    def text(self) -> str:
        return self.name


@dataclass(frozen=True)
class Unary:
    func: str
    arg: object

    def source(self) -> str:
        return f"_{self.func}({self.arg.source()})"

    def text(self) -> str:
        return f"{self.func}({self.arg.text()})"


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object

    def source(self) -> str:
        l, r = self.left.source(), self.right.source()
        if self.op == "/":
            return f"_div({l}, {r})"
        return f"({l} {self.op} {r})"

    def text(self) -> str:
        return f"({self.left.text()} {self.op} {self.right.text()})"


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int

    def source(self) -> str:
        return f"_pow({self.base.source()}, {self.exponent})"

    def text(self) -> str:
        e = str(self.exponent) if self.exponent >= 0 else f"-{-self.exponent}"
        return f"({self.base.text()} ^ {e})"


_NAMESPACE = {f"_{name}": fn for name, fn in dual.FUNCTIONS.items()}
_NAMESPACE.update(_div=dual.div, _pow=dual.ipow)


class Expression:
    """Immutable scalar expression over an ordered list of variables."""

    __slots__ = ("root", "variables", "_fn")

    def __init__(self, root, variables: Sequence[str]):
        self.root = root
        self.variables = tuple(variables)
        src = f"def _f(v):\n    return {root.source()}\n"
        ns = dict(_NAMESPACE)
        exec(compile(src, "<expression>", "exec"), ns)
        self._fn: Callable = ns["_f"]

    def __str__(self) -> str:
        return self.root.text()

    def __repr__(self) -> str:
        return f"Expression({str(self)!r}, {list(self.variables)!r})"

    @property
    def n(self) -> int:
        return len(self.variables)

    # generic evaluation on floats or duals
    def evaluate(self, values):
        try:
            out = self._fn(values)
        except ZeroDivisionError:
            raise DomainError("division by zero") from None
        except OverflowError:
            raise DomainError("overflow") from None
        if not dual.is_finite(out):
            raise DomainError(f"non-finite value from {self}")
        return out

    def _check(self, point) -> tuple:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.n}")
        pt = tuple(float(p) for p in point)
        if not all(math.isfinite(p) for p in pt):
            raise ValueError("point has non-finite coordinates")
        return pt

    def eval(self, point) -> float:
        return float(self.evaluate(self._check(point)))

    __call__ = eval

    def partial(self, i: int, point) -> float:
        pt = self._check(point)
        return float(dual.tangent(self.evaluate(dual.seed(pt, i))))

    def gradient(self, point) -> list:
        pt = self._check(point)
        return [float(dual.tangent(self.evaluate(dual.seed(pt, i)))) for i in range(self.n)]

    def mixed_partial(self, i: int, k: int, point) -> float:
        # canonical order makes the result exactly symmetric in (i, k)
        i, k = min(i, k), max(i, k)
        pt = self._check(point)
        v = tuple(
            Dual(Dual(p, 1.0 if m == k else 0.0), Dual(1.0 if m == i else 0.0, 0.0))
            for m, p in enumerate(pt)
        )
        out = self.evaluate(v)
        return float(dual.tangent(dual.tangent(out)))

    # composition helpers; both operands must share the variable list
    def _lift(self, other) -> object:
        if isinstance(other, Expression):
            if other.variables != self.variables:
                raise ValueError("cannot combine expressions over different variables")
            return other.root
        return Const(float(other))

    def _bin(self, op, other, swap=False):
        a, b = self.root, self._lift(other)
        if swap:
            a, b = b, a
        return Expression(Binary(op, a, b), self.variables)

    def __add__(self, o):
        return self._bin("+", o)

    def __radd__(self, o):
        return self._bin("+", o, swap=True)

    def __sub__(self, o):
        return self._bin("-", o)

    def __rsub__(self, o):
        return self._bin("-", o, swap=True)

    def __mul__(self, o):
        return self._bin("*", o)

    def __rmul__(self, o):
        return self._bin("*", o, swap=True)

    def __truediv__(self, o):
        return self._bin("/", o)

    def __rtruediv__(self, o):
        return self._bin("/", o, swap=True)

    def __neg__(self):
        return Expression(Unary("neg", self.root), self.variables)

    def __pow__(self, n: int):
        return Expression(Pow(self.root, int(n)), self.variables)

    def apply(self, func: str) -> "Expression":
        if func not in FUNC_NAMES:
            raise ValueError(f"unknown function {func!r}")
        return Expression(Unary(func, self.root), self.variables)

    def is_constant(self) -> bool:
        return _no_vars(self.root)

    def __reduce__(self):
        return (parse_expression, (str(self), list(self.variables)))


def _no_vars(node) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, Const):
        return True
    if isinstance(node, Unary):
        return _no_vars(node.arg)
    if isinstance(node, Pow):
        return _no_vars(node.base)
    return _no_vars(node.left) and _no_vars(node.right)


def constant(value: float, variables: Sequence[str]) -> Expression:
    return Expression(Const(float(value)), variables)


def variable(name: str, variables: Sequence[str]) -> Expression:
    variables = tuple(variables)
    return Expression(Var(variables.index(name), name), variables)


# -- parser ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos, out = 0, []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.index = {name: k for k, name in enumerate(variables)}

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind == "end" and value:
            what = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {what}", pos)

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        kind, text, pos = self.peek()
        if kind == "op" and text in ("-", "+"):
            self.take()
            inner = self.factor()
            return Unary("neg", inner) if text == "-" else inner
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, text, pos = self.take()
            if kind != "num" or not text.isdigit():
                raise ParseError("exponent must be an integer literal", pos)
            node = Pow(node, sign * int(text))
        return node

    def base(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "id":
            if text in FUNC_NAMES:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(text, arg)
            if text in self.index:
                return Var(self.index[text], text)
            if text in CONSTANTS:
                return Const(CONSTANTS[text])
            raise UnknownIdentifierError(text, pos)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", pos)


def parse_expression(text: str, variables: Sequence[str]) -> Expression:
    """Parse ``text`` into an :class:`Expression` over ``variables``."""
    variables = tuple(variables)
    for name in variables:
        if name in FUNC_NAMES or name in CONSTANTS:
            raise ValueError(f"variable name {name!r} is reserved")
    if len(set(variables)) != len(variables):
        raise ValueError("duplicate variable names")
    return Expression(_Parser(str(text), variables).parse(), variables)


def parse_many(texts, variables: Sequence[str]) -> list:
    return [parse_expression(t, variables) for t in texts]
