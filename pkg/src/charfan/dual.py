"""Forward-mode dual numbers.

Components of a :class:`Dual` may themselves be duals, so nesting two
levels gives exact second (mixed) partial derivatives. The math functions
below accept plain floats or duals and raise :class:`DomainError` instead of
returning non-finite values.
"""
from __future__ import annotations

import math
from typing import Union

from .errors import DomainError

Number = Union[float, "Dual"]


def primal(x) -> float:
    while isinstance(x, Dual):
        x = x.re
    return x


def is_finite(x) -> bool:
    if isinstance(x, Dual):
        return is_finite(x.re) and is_finite(x.eps)
    return math.isfinite(x)


def _finite(x: float, what: str) -> float:
    if not math.isfinite(x):
        raise DomainError(f"{what} produced a non-finite value")
    return x


class Dual:
    """Number of the form re + eps*e with e*e = 0."""

    __slots__ = ("re", "eps")

    def __init__(self, re, eps=0.0):
        self.re = re
        self.eps = eps

    def __repr__(self) -> str:
        return f"Dual({self.re!r}, {self.eps!r})"

    def __add__(self, o):
        if isinstance(o, Dual):
            return Dual(self.re + o.re, self.eps + o.eps)
        return Dual(self.re + o, self.eps)

    __radd__ = __add__

    def __sub__(self, o):
        if isinstance(o, Dual):
            return Dual(self.re - o.re, self.eps - o.eps)
        return Dual(self.re - o, self.eps)

    def __rsub__(self, o):
        return Dual(o - self.re, -self.eps)

    def __neg__(self):
        return Dual(-self.re, -self.eps)

    def __pos__(self):
        return self

    def __mul__(self, o):
        if isinstance(o, Dual):
            return Dual(self.re * o.re, self.re * o.eps + self.eps * o.re)
        return Dual(self.re * o, self.eps * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        return div(self, o)

    def __rtruediv__(self, o):
        return div(o, self)

    def __pow__(self, n):
        return ipow(self, n)


def div(a, b):
    if primal(b) == 0.0:
        raise DomainError("division by zero")
    if isinstance(b, Dual):
        q = div(a.re if isinstance(a, Dual) else a, b.re)
        a_eps = a.eps if isinstance(a, Dual) else 0.0
        return Dual(q, div(a_eps - q * b.eps, b.re))
    if isinstance(a, Dual):
        return Dual(div(a.re, b), div(a.eps, b))
    return _finite(a / b, "division")


def ipow(x, n: int):
    if not isinstance(n, int):
        raise TypeError("only integer exponents are supported")
    if n < 0:
        return div(1.0, ipow(x, -n))
    if isinstance(x, Dual):
        if n == 0:
            return Dual(ipow(x.re, 0), 0.0 * x.eps)
        return Dual(ipow(x.re, n), n * ipow(x.re, n - 1) * x.eps)
    try:
        return _finite(float(x) ** n, "power")
    except OverflowError:
        raise DomainError("power overflow") from None


def neg(x):
    return -x


def sin(x):
    if isinstance(x, Dual):
        return Dual(sin(x.re), cos(x.re) * x.eps)
    return math.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return Dual(cos(x.re), -sin(x.re) * x.eps)
    return math.cos(x)


def tan(x):
    if isinstance(x, Dual):
        t = tan(x.re)
        return Dual(t, (1.0 + t * t) * x.eps)
    return _finite(math.tan(x), "tan")


def atan(x):
    if isinstance(x, Dual):
        return Dual(atan(x.re), div(x.eps, 1.0 + x.re * x.re))
    return math.atan(x)


def exp(x):
    if isinstance(x, Dual):
        e = exp(x.re)
        return Dual(e, e * x.eps)
    try:
        return math.exp(x)
    except OverflowError:
        raise DomainError("exp overflow") from None


def log(x):
    if primal(x) <= 0.0:
        raise DomainError("log of non-positive value")
    if isinstance(x, Dual):
        return Dual(log(x.re), div(x.eps, x.re))
    return math.log(x)


def sqrt(x):
    p = primal(x)
    if p < 0.0:
        raise DomainError("sqrt of negative value")
    if isinstance(x, Dual):
        s = sqrt(x.re)
        return Dual(s, div(x.eps, 2.0 * s))
    return math.sqrt(x)


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "atan": atan,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "neg": neg,
}


def seed(values, direction: int):
    """Lift a point to duals with unit tangent along coordinate ``direction``."""
    return tuple(Dual(v, 1.0 if m == direction else 0.0) for m, v in enumerate(values))


def tangent(x):
    """Tangent component of a dual; zero for constants."""
    return x.eps if isinstance(x, Dual) else 0.0


def value(x):
    return x.re if isinstance(x, Dual) else x
