"""Sparse multivariate polynomials over an exact coefficient field.

A polynomial is a mapping from exponent tuples to nonzero coefficients
(``Fraction`` or :class:`~frontkit.arith.RatFunc`) together with a
:class:`Ring` naming its variables.  Values are immutable once built.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from .arith import RatFunc, format_rational

Exp = Tuple[int, ...]


class RingMismatchError(ValueError):
    pass


class UnknownVariableError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col


# -- monomial orders -----------------------------------------------------------

class MonomialOrder:
    """A monomial order given by a key: larger key means larger monomial.

    Keys are flat integer tuples, so negating every component reverses the
    order (used for max-heaps in the reducer).
    """

    def __init__(self, name: str, key):
        self.name = name
        self.key = key

    def __repr__(self):
        return f"MonomialOrder({self.name})"

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


def _degrevlex_key(e: Exp):
    return (sum(e),) + tuple(-x for x in reversed(e))


DEGREVLEX = MonomialOrder("degrevlex", _degrevlex_key)
LEX = MonomialOrder("lex", tuple)


def block_order(k: int) -> MonomialOrder:
    """Elimination order: lex on the first ``k`` variables, degrevlex on the rest."""

    def key(e):
        return tuple(e[:k]) + _degrevlex_key(e[k:])

    return MonomialOrder(f"block{k}", key)


def order_by_name(name: str) -> MonomialOrder:
    if name == "degrevlex":
        return DEGREVLEX
    if name == "lex":
        return LEX
    m = re.fullmatch(r"block(\d+)", name)
    if m:
        return block_order(int(m.group(1)))
    raise ValueError(f"unknown monomial order {name!r}")


# -- rings ---------------------------------------------------------------------

class Ring:
    """Polynomial ring Q[names] (or Q(h)[names]); compared structurally."""

    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        self._index = {n: i for i, n in enumerate(self.names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Ring({', '.join(self.names)})"

    def index(self, var) -> int:
        if isinstance(var, int):
            if 0 <= var < len(self.names):
                return var
            raise UnknownVariableError(f"variable index {var} out of range for {self}")
        try:
            return self._index[var]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {var!r} in {self}") from None

    def __contains__(self, name):
        return name in self._index

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: c})

    def var(self, name) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): Fraction(1)})

    def gens(self) -> List["Polynomial"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, exp: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exp): coeff})

    def parse(self, text: str) -> "Polynomial":
        return _Parser(self, text).parse()


Coeff = Union[Fraction, RatFunc]


def _norm_coeff(c):
    if isinstance(c, int):
        return Fraction(c)
    return c


def _is_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, RatFunc))


class Polynomial:
    __slots__ = ("ring", "terms", "_sorted", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Exp, Coeff], _clean: bool = False):
        self.ring = ring
        if _clean:
            self.terms = dict(terms)
        else:
            n = ring.nvars
            clean = {}
            for e, c in terms.items():
                if len(e) != n:
                    raise RingMismatchError(f"exponent {e} does not fit {ring}")
                if c:
                    clean[tuple(e)] = _norm_coeff(c)
            self.terms = clean
        self._sorted = {}
        self._hash = None

    # -- basic protocol --------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if _is_scalar(other):
            if not other:
                return not self.terms
            return self.terms == {(0,) * self.ring.nvars: other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if _is_scalar(other):
            return self.ring.const(other)
        return None

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Polynomial(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            if not other:
                return self.ring.zero()
            other = _norm_coeff(other)
            return Polynomial(self.ring, {e: c * other for e, c in self.terms.items()}, _clean=True)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: Dict[Exp, Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial(self.ring, {e: c for e, c in out.items() if c}, _clean=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            if not other:
                raise ZeroDivisionError("polynomial divided by zero")
            inv = 1 / _norm_coeff(other)
            return self * inv
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, exp: Exp, coeff) -> "Polynomial":
        return Polynomial(
            self.ring,
            {tuple(a + b for a, b in zip(e, exp)): c * coeff for e, c in self.terms.items()},
            _clean=True,
        )

    # -- queries -----------------------------------------------------------------

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX) -> List[Tuple[Exp, Coeff]]:
        """Terms in decreasing order; cached per order."""
        s = self._sorted.get(order.name)
        if s is None:
            s = sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)
            self._sorted[order.name] = s
        return s

    def leading_term(self, order: MonomialOrder = DEGREVLEX) -> Tuple[Exp, Coeff]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms(order)[0]

    def leading_monomial(self, order: MonomialOrder = DEGREVLEX) -> Exp:
        return self.leading_term(order)[0]

    def leading_coeff(self, order: MonomialOrder = DEGREVLEX):
        return self.leading_term(order)[1]

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var) -> int:
        i = self.ring.index(var)
        return max((e[i] for e in self.terms), default=-1)

    def coeff(self, exp: Sequence[int]):
        return self.terms.get(tuple(exp), Fraction(0))

    def constant_coeff(self):
        return self.coeff((0,) * self.ring.nvars)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def variables(self) -> List[str]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return [self.ring.names[i] for i in sorted(used)]

    def monic(self, order: MonomialOrder = DEGREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coeff(order)
        return self if lc == 1 else self * (1 / lc)

    def map_coeffs(self, fn) -> "Polynomial":
        return Polynomial(self.ring, {e: fn(c) for e, c in self.terms.items()})

    # -- calculus and composition ------------------------------------------------

    def derivative(self, var) -> "Polynomial":
        i = self.ring.index(var)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = c * k
        return Polynomial(self.ring, out, _clean=True)

    def substitute(self, assignment: Mapping, ring: Ring = None) -> "Polynomial":
        """Compose: replace variables by polynomials or field elements.

        Images that are polynomials must share one ring, which becomes the
        result ring; unassigned variables are carried over by name.
        """
        idx_images = {}
        target = ring
        for var, img in assignment.items():
            i = self.ring.index(var)
            if isinstance(img, Polynomial):
                if target is None:
                    target = img.ring
                elif img.ring != target:
                    raise RingMismatchError(f"substitution images live in {img.ring} and {target}")
            elif not _is_scalar(img):
                raise TypeError(f"cannot substitute {img!r}")
            idx_images[i] = img
        if target is None:
            target = self.ring
        images = []
        for i, name in enumerate(self.ring.names):
            if i in idx_images:
                img = idx_images[i]
                images.append(img if isinstance(img, Polynomial) else target.const(img))
            elif name in target:
                images.append(target.var(name))
            else:
                images.append(None)
        result = target.zero()
        cache: Dict[Tuple[int, int], Polynomial] = {}
        acc: Dict[Exp, Coeff] = {}
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if not k:
                    continue
                if images[i] is None:
                    raise RingMismatchError(
                        f"variable {self.ring.names[i]!r} is unassigned and absent from {target}")
                pw = cache.get((i, k))
                if pw is None:
                    pw = images[i] ** k
                    cache[(i, k)] = pw
                term = term * pw
            for e2, c2 in term.terms.items():
                v = acc.get(e2)
                acc[e2] = c2 if v is None else v + c2
        result = Polynomial(target, {e: c for e, c in acc.items() if c}, _clean=True)
        return result

    def evaluate(self, point):
        """Value at a full point (mapping by name, or sequence by index)."""
        if isinstance(point, Mapping):
            vals = [point[n] for n in self.ring.names]
        else:
            vals = list(point)
            if len(vals) != self.ring.nvars:
                raise RingMismatchError(f"point of arity {len(vals)} for {self.ring}")
        cache = {}
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    pw = cache.get((i, k))
                    if pw is None:
                        pw = vals[i] ** k
                        cache[(i, k)] = pw
                    term = term * pw
            total = total + term
        return total

    def to_ring(self, ring: Ring) -> "Polynomial":
        """Re-embed into a ring containing every variable this polynomial uses."""
        if ring == self.ring:
            return self
        pos = []
        for i, name in enumerate(self.ring.names):
            pos.append(ring.index(name) if name in ring else None)
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    if pos[i] is None:
                        raise RingMismatchError(
                            f"variable {self.ring.names[i]!r} absent from {ring}")
                    e2[pos[i]] = k
            out[tuple(e2)] = c
        return Polynomial(ring, out, _clean=True)

    def coefficients_in(self, names: Sequence[str]) -> Dict[Exp, "Polynomial"]:
        """Split as sum over monomials in ``names`` with coefficients in the other variables."""
        outer = [self.ring.index(n) for n in names]
        inner = [i for i in range(self.ring.nvars) if i not in outer]
        inner_ring = Ring(self.ring.names[i] for i in inner)
        groups: Dict[Exp, Dict[Exp, Coeff]] = {}
        for e, c in self.terms.items():
            eo = tuple(e[i] for i in outer)
            ei = tuple(e[i] for i in inner)
            groups.setdefault(eo, {})[ei] = c
        return {eo: Polynomial(inner_ring, t, _clean=True) for eo, t in groups.items()}

    # -- printing ------------------------------------------------------------------

    def __repr__(self):
        return f"Polynomial({self})"

    def __str__(self):
        return format_poly(self)


def _fmt_coeff(c) -> Tuple[str, str]:
    """(sign, magnitude text) for a coefficient."""
    if isinstance(c, RatFunc):
        if c.is_constant():
            return _fmt_coeff(c.num[0])
        return "+", f"({c})"
    c = Fraction(c)
    return ("-" if c < 0 else "+"), format_rational(abs(c))


def format_poly(p: Polynomial, order: MonomialOrder = DEGREVLEX) -> str:
    if not p.terms:
        return "0"
    parts = []
    for e, c in p.sorted_terms(order):
        mono = "*".join(
            name if k == 1 else f"{name}^{k}"
            for name, k in zip(p.ring.names, e) if k
        )
        sign, mag = _fmt_coeff(c)
        if not mono:
            body = mag
        elif mag == "1":
            body = mono
        else:
            body = f"{mag}*{mono}"
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# -- parser ------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))"
)


class _Parser:
    """Recursive descent for infix polynomials; '*' may be omitted."""

    def __init__(self, ring: Ring, text: str):
        self.ring = ring
        self.text = text
        self.tokens = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.error("empty polynomial")
        p = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def _starts_atom(self, tok):
        return tok[0] in ("num", "name") or (tok[0] == "op" and tok[1] == "(")

    def term(self):
        p = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                p = p * self.unary()
            elif tok[0] == "op" and tok[1] == "/":
                self.take()
                q = self.unary()
                if not q.is_constant() or q.is_zero():
                    self.error("division only by nonzero constants", tok)
                p = p / q.constant_coeff()
            elif self._starts_atom(tok):
                p = p * self.power()
            else:
                return p

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            p = self.unary()
            return -p if tok[1] == "-" else p
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("^", "**"):
            self.take()
            etok = self.peek()
            neg = False
            if etok[0] == "op" and etok[1] == "(":
                self.take()
                etok = self.take()
                close = self.take()
                if close[1] != ")":
                    self.error("expected ')'", close)
            else:
                self.take()
            if etok[0] != "num" or not etok[1].isdigit() or neg:
                self.error("exponent must be a non-negative integer", etok)
            return base ** int(etok[1])
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return self.ring.const(Fraction(val))
        if kind == "name":
            if val not in self.ring:
                self.error(f"unknown variable {val!r}", tok)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            close = self.take()
            if close[1] != ")":
                self.error("expected ')'", close)
            return p
        self.error(f"unexpected {val!r}" if val else "unexpected end of input", tok)


def parse_poly(text: str, names: Sequence[str]) -> Polynomial:
    return Ring(names).parse(text)
