"""Order-3 truncated Taylor jets.

A ``Jet3`` carries a value together with its first three derivatives with
respect to a single parameter.  Arithmetic propagates derivatives exactly
(Leibniz and Faa di Bruno rules), so the only error in any channel is
floating-point roundoff.  This is the differentiation currency used by the
rest of the package; finite differences exist only as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real


class JetDomainError(ArithmeticError):
    """A jet operation left its real domain (sqrt of a negative, log of a
    non-positive, division by zero, overflow)."""


def _coerce(x) -> "Jet3":
    if isinstance(x, Jet3):
        return x
    if isinstance(x, Real):
        return Jet3(float(x))
    raise TypeError(f"cannot mix Jet3 with {type(x).__name__}")


@dataclass(frozen=True)
class Jet3:
    """Value ``v0`` and derivatives ``v1``, ``v2``, ``v3``."""

    v0: float
    v1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0

    @staticmethod
    def constant(c: float) -> "Jet3":
        return Jet3(float(c), 0.0, 0.0, 0.0)

    @staticmethod
    def variable(s: float) -> "Jet3":
        """Seed jet for the independent variable: derivative one."""
        return Jet3(float(s), 1.0, 0.0, 0.0)

    def __add__(self, other):
        o = _coerce(other)
        return Jet3(self.v0 + o.v0, self.v1 + o.v1, self.v2 + o.v2, self.v3 + o.v3)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        return Jet3(self.v0 - o.v0, self.v1 - o.v1, self.v2 - o.v2, self.v3 - o.v3)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __neg__(self):
        return Jet3(-self.v0, -self.v1, -self.v2, -self.v3)

    def __mul__(self, other):
        o = _coerce(other)
        return Jet3(
            self.v0 * o.v0,
            self.v1 * o.v0 + self.v0 * o.v1,
            self.v2 * o.v0 + 2.0 * self.v1 * o.v1 + self.v0 * o.v2,
            self.v3 * o.v0 + 3.0 * self.v2 * o.v1 + 3.0 * self.v1 * o.v2 + self.v0 * o.v3,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o.v0 == 0.0:
            raise JetDomainError("division by zero")
        # Leibniz applied to self = q * o, solved channel by channel.
        q0 = self.v0 / o.v0
        q1 = (self.v1 - q0 * o.v1) / o.v0
        q2 = (self.v2 - q0 * o.v2 - 2.0 * q1 * o.v1) / o.v0
        q3 = (self.v3 - q0 * o.v3 - 3.0 * q1 * o.v2 - 3.0 * q2 * o.v1) / o.v0
        return Jet3(q0, q1, q2, q3)

    def __rtruediv__(self, other):
        return _coerce(other).__truediv__(self)

    def __pow__(self, exponent):
        if isinstance(exponent, Fraction):
            return pow_rational(self, exponent)
        if isinstance(exponent, int):
            return pow_int(self, exponent)
        raise TypeError("jet exponent must be int or Fraction")


def compose(u: Jet3, d0: float, d1: float, d2: float, d3: float) -> Jet3:
    """Chain rule for F(u) given outer derivatives d0..d3 of F at u.v0."""
    return Jet3(
        d0,
        d1 * u.v1,
        d2 * u.v1 * u.v1 + d1 * u.v2,
        d3 * u.v1 ** 3 + 3.0 * d2 * u.v1 * u.v2 + d1 * u.v3,
    )


def pow_int(u: Jet3, n: int) -> Jet3:
    """Integer power by square-and-multiply; exact at u.v0 = 0 for n >= 0."""
    if n == 0:
        return Jet3.constant(1.0)
    if n < 0:
        return Jet3.constant(1.0) / pow_int(u, -n)
    result = None
    base = u
    while n:
        if n & 1:
            result = base if result is None else result * base
        base = base * base
        n >>= 1
    return result


def pow_rational(u: Jet3, p: Fraction) -> Jet3:
    if p.denominator == 1:
        return pow_int(u, int(p))
    if u.v0 <= 0.0:
        raise JetDomainError("fractional power of a non-positive base")
    pf = float(p)
    d0 = u.v0 ** pf
    d1 = pf * u.v0 ** (pf - 1.0)
    d2 = pf * (pf - 1.0) * u.v0 ** (pf - 2.0)
    d3 = pf * (pf - 1.0) * (pf - 2.0) * u.v0 ** (pf - 3.0)
    return compose(u, d0, d1, d2, d3)


def sin(u: Jet3) -> Jet3:
    s, c = math.sin(u.v0), math.cos(u.v0)
    return compose(u, s, c, -s, -c)


def cos(u: Jet3) -> Jet3:
    s, c = math.sin(u.v0), math.cos(u.v0)
    return compose(u, c, -s, -c, s)


def tan(u: Jet3) -> Jet3:
    t = math.tan(u.v0)
    sec2 = 1.0 + t * t
    return compose(u, t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t))


def sinh(u: Jet3) -> Jet3:
    try:
        sh, ch = math.sinh(u.v0), math.cosh(u.v0)
    except OverflowError as exc:
        raise JetDomainError("sinh overflow") from exc
    return compose(u, sh, ch, sh, ch)


def cosh(u: Jet3) -> Jet3:
    try:
        sh, ch = math.sinh(u.v0), math.cosh(u.v0)
    except OverflowError as exc:
        raise JetDomainError("cosh overflow") from exc
    return compose(u, ch, sh, ch, sh)


def asinh(u: Jet3) -> Jet3:
    w = 1.0 + u.v0 * u.v0
    r = w ** -0.5
    return compose(
        u,
        math.asinh(u.v0),
        r,
        -u.v0 * w ** -1.5,
        (2.0 * u.v0 * u.v0 - 1.0) * w ** -2.5,
    )


def sqrt(u: Jet3) -> Jet3:
    if u.v0 <= 0.0:
        raise JetDomainError("sqrt of a non-positive value")
    root = math.sqrt(u.v0)
    return compose(
        u,
        root,
        0.5 / root,
        -0.25 / (root * u.v0),
        0.375 / (root * u.v0 * u.v0),
    )


def exp(u: Jet3) -> Jet3:
    try:
        e = math.exp(u.v0)
    except OverflowError as exc:
        raise JetDomainError("exp overflow") from exc
    return compose(u, e, e, e, e)


def ln(u: Jet3) -> Jet3:
    if u.v0 <= 0.0:
        raise JetDomainError("ln of a non-positive value")
    x = u.v0
    return compose(u, math.log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))


def neg(u: Jet3) -> Jet3:
    return -u


#: Unary functions available to the expression language.
FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "sinh": sinh,
    "cosh": cosh,
    "asinh": asinh,
    "sqrt": sqrt,
    "exp": exp,
    "ln": ln,
    "neg": neg,
}
