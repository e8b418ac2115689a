"""Exact coefficient fields.

Rationals are :class:`fractions.Fraction`.  :class:`RatFunc` is the field
Q(h) of univariate rational functions, used to restrict parameter-dependent
quantities to a line ``p + h*d`` and differentiate them at ``h = 0``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction, "RatFunc"]

UPoly = Tuple[Fraction, ...]  # dense, low degree first, no trailing zeros


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer or a decimal string into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def format_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# -- dense univariate polynomials over Q -------------------------------------

def _trim(c: Sequence[Fraction]) -> UPoly:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def upoly(coeffs) -> UPoly:
    return _trim(Fraction(c) for c in coeffs)


def uadd(a: UPoly, b: UPoly) -> UPoly:
    if len(a) < len(b):
        a, b = b, a
    return _trim([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])


def uneg(a: UPoly) -> UPoly:
    return tuple(-x for x in a)


def usub(a: UPoly, b: UPoly) -> UPoly:
    return uadd(a, uneg(b))


def umul(a: UPoly, b: UPoly) -> UPoly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def uscale(a: UPoly, c) -> UPoly:
    if c == 0:
        return ()
    return tuple(x * c for x in a)


def udivmod(a: UPoly, b: UPoly) -> Tuple[UPoly, UPoly]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    r = list(a)
    db = len(b) - 1
    lc = b[-1]
    if len(r) <= db:
        return (), _trim(r)
    q = [Fraction(0)] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k]
        if c:
            c = c / lc
            q[k - db] = c
            for j in range(db + 1):
                r[k - db + j] -= c * b[j]
    return _trim(q), _trim(r[:db])


def umonic(a: UPoly) -> UPoly:
    if not a:
        return a
    lc = a[-1]
    return a if lc == 1 else tuple(x / lc for x in a)


def ugcd(a: UPoly, b: UPoly) -> UPoly:
    """Monic gcd; gcd(0, 0) = 0."""
    while b:
        a, b = b, udivmod(a, b)[1]
    return umonic(a)


def ueval(a: UPoly, x):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def uderiv(a: UPoly) -> UPoly:
    return _trim([i * a[i] for i in range(1, len(a))])


def ustr(a: UPoly, var: str = "h") -> str:
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        c = a[i]
        if not c:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            body = format_rational(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{format_rational(abs(c))}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# -- Q(h) ---------------------------------------------------------------------

class RatFunc:
    """Element of Q(h) kept as num/den, coprime, with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=(), den=(Fraction(1),), _normalized=False):
        if isinstance(num, (int, Fraction)):
            num = (Fraction(num),)
        num = _trim(Fraction(c) for c in num) if not _normalized else num
        den = _trim(Fraction(c) for c in den) if not _normalized else den
        if not _normalized:
            if not den:
                raise ZeroDivisionError("rational function with zero denominator")
            if not num:
                den = (Fraction(1),)
            else:
                g = ugcd(num, den)
                if len(g) > 1:
                    num = udivmod(num, g)[0]
                    den = udivmod(den, g)[0]
                lc = den[-1]
                if lc != 1:
                    num = tuple(c / lc for c in num)
                    den = tuple(c / lc for c in den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def h(cls) -> "RatFunc":
        """The transcendental generator."""
        return cls((Fraction(0), Fraction(1)), (Fraction(1),), _normalized=True)

    @classmethod
    def const(cls, c) -> "RatFunc":
        c = Fraction(c)
        return cls((c,) if c else (), (Fraction(1),), _normalized=True)

    @staticmethod
    def _coerce(other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(other)
        return NotImplemented

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.num[0] if self.num else Fraction(0))
            else:
                self._hash = hash((self.num, self.den))
        return self._hash

    def __neg__(self):
        return RatFunc(uneg(self.num), self.den, _normalized=True)

    def __add__(self, other):
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(uadd(self.num, o.num), self.den)
        return RatFunc(uadd(umul(self.num, o.den), umul(o.num, self.den)),
                       umul(self.den, o.den))

    __radd__ = __add__

    def __sub__(self, other):
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RatFunc()
            return RatFunc(uscale(self.num, other), self.den, _normalized=True)
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RatFunc(umul(self.num, o.num), umul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero in Q(h)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = RatFunc._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = RatFunc.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self) -> "RatFunc":
        """Formal d/dh by the quotient rule."""
        n, d = self.num, self.den
        return RatFunc(usub(umul(uderiv(n), d), umul(n, uderiv(d))), umul(d, d))

    def value_at(self, x) -> Fraction:
        dv = ueval(self.den, x)
        if dv == 0:
            raise ZeroDivisionError(f"pole of {self} at h = {x}")
        return ueval(self.num, x) / dv

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if len(self.den) == 1:
            return ustr(self.num)
        return f"({ustr(self.num)})/({ustr(self.den)})"


def ratfunc_derivative_at_zero(r) -> Fraction:
    """(d/dh r)(0); constants (int/Fraction) have derivative 0."""
    if not isinstance(r, RatFunc):
        return Fraction(0)
    if ueval(r.den, 0) == 0:
        raise ZeroDivisionError(f"pole at h = 0 in {r}")
    return r.derivative().value_at(0)


def to_fraction(c) -> Fraction:
    """Constant field element as a Fraction (raises for non-constant RatFunc)."""
    if isinstance(c, RatFunc):
        if not c.is_constant():
            raise ValueError(f"{c} is not constant")
        return c.num[0] if c.num else Fraction(0)
    return Fraction(c)
