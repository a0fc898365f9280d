"""Exact coefficients: rationals, Laurent polynomials in q, specialization.

Rationals are plain :class:`fractions.Fraction`.  Laurent polynomials are
immutable maps ``exponent -> Fraction`` with zero coefficients dropped, so
equal values always compare and hash equal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


class InvalidSpecialization(ValueError):
    pass


class NotDivisible(ArithmeticError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


class LaurentQ:
    """Element of Q[q, q^-1]."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs=None):
        c = {}
        if coeffs:
            for e, v in dict(coeffs).items():
                v = as_fraction(v)
                if v:
                    c[int(e)] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c):
        obj = cls.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    @classmethod
    def q(cls, power: int = 1) -> LaurentQ:
        return cls._raw({power: Fraction(1)})

    @classmethod
    def const(cls, value) -> LaurentQ:
        value = as_fraction(value)
        return cls._raw({0: value} if value else {})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._c)

    def degree_range(self):
        if not self._c:
            return None
        return min(self._c), max(self._c)

    def is_monomial(self) -> bool:
        return len(self._c) == 1

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, LaurentQ):
            return self._c == other._c
        if isinstance(other, (int, Fraction)):
            return self._c == ({0: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if not self._c:
                self._hash = hash(0)
            elif len(self._c) == 1 and 0 in self._c:
                self._hash = hash(self._c[0])
            else:
                self._hash = hash(frozenset(self._c.items()))
        return self._hash

    @staticmethod
    def _coerce(x):
        if isinstance(x, LaurentQ):
            return x
        if isinstance(x, (int, Fraction)):
            return LaurentQ.const(x)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        c = dict(self._c)
        for e, v in other._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return LaurentQ._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentQ._raw({e: -v for e, v in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        c: dict[int, Fraction] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return LaurentQ._raw({e: v for e, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return (LaurentQ.const(1) / self) ** (-n)
        out = LaurentQ.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        """Exact division; raises :class:`NotDivisible` if the quotient is not Laurent."""
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if not self:
            return LaurentQ()
        if other.is_monomial():
            (e0, v0), = other._c.items()
            return LaurentQ._raw({e - e0: v / v0 for e, v in self._c.items()})
        return _poly_divide(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def specialize(self, q0) -> Fraction:
        return specialize(self, q0)

    def __repr__(self):
        return f"LaurentQ({format_laurent(self)!r})"

    def __str__(self):
        return format_laurent(self)


def _poly_divide(a: LaurentQ, b: LaurentQ) -> LaurentQ:
    # shift both to ordinary polynomials, long-divide from the top
    amin, _ = a.degree_range()
    bmin, bmax = b.degree_range()
    rem = {e - amin: v for e, v in a._c.items()}
    den = {e - bmin: v for e, v in b._c.items()}
    dtop = bmax - bmin
    lead = den[dtop]
    quot = {}
    while rem:
        top = max(rem)
        if top < dtop:
            raise NotDivisible(f"{format_laurent(a)} / {format_laurent(b)}")
        f = rem[top] / lead
        shift = top - dtop
        quot[shift] = f
        for e, v in den.items():
            k = e + shift
            s = rem.get(k, 0) - f * v
            if s:
                rem[k] = s
            else:
                rem.pop(k, None)
    return LaurentQ._raw({e + amin - bmin: v for e, v in quot.items()})


Q = LaurentQ.q()


def laurent_arith(a: LaurentQ, b: LaurentQ, op: str) -> LaurentQ:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def specialize(a, q0) -> Fraction:
    """Evaluate a Laurent polynomial (or rational) at ``q = q0``."""
    q0 = as_fraction(q0)
    if q0 == 0:
        raise InvalidSpecialization("q0 = 0 is not allowed")
    if not isinstance(a, LaurentQ):
        return as_fraction(a)
    return sum((v * q0 ** e for e, v in a._c.items()), Fraction(0))


def is_zero(x) -> bool:
    return not x


def invert(c):
    """Inverse of a unit scalar (nonzero rational or signed rational multiple of q^k)."""
    if isinstance(c, LaurentQ):
        if not c.is_monomial():
            raise NotDivisible(f"{format_laurent(c)} is not a unit in Q[q, q^-1]")
        return LaurentQ.const(1) / c
    if not c:
        raise ZeroDivisionError("zero has no inverse")
    return 1 / as_fraction(c)


# -- text form -------------------------------------------------------------

def format_fraction(x: Fraction) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_laurent(a: LaurentQ) -> str:
    """Terms in descending exponent order, e.g. ``q^2 - 1/2*q^-1 + 3``."""
    if not a._c:
        return "0"
    parts = []
    for i, e in enumerate(sorted(a._c, reverse=True)):
        v = a._c[e]
        neg = v < 0
        mag = -v if neg else v
        if e == 0:
            body = format_fraction(mag)
        elif mag == 1:
            body = f"q^{e}"
        else:
            body = f"{format_fraction(mag)}*q^{e}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)(?:\*)?)?(?:(q)(?:\^(-?\d+))?)?$")


def parse_laurent(text: str) -> LaurentQ:
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty Laurent polynomial")
    if s[0] not in "+-":
        s = "+" + s
    out: dict[int, Fraction] = {}
    for sign, body in re.findall(r"([+-])([^+-]+)", _protect(s)):
        body = body.replace("~", "-")
        m = _TERM.match(body)
        if not m or body == "":
            raise ValueError(f"bad Laurent term {body!r} in {text!r}")
        coeff = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        if m.group(2):
            e = int(m.group(3)) if m.group(3) is not None else 1
        else:
            if not m.group(1):
                raise ValueError(f"bad Laurent term {body!r} in {text!r}")
            e = 0
        if sign == "-":
            coeff = -coeff
        out[e] = out.get(e, 0) + coeff
    return LaurentQ(out)


def _protect(s: str) -> str:
    # hide minus signs of negative exponents from the term splitter
    return s.replace("^-", "^~")


def parse_scalar(text: str):
    """Rational if the text has no ``q``, else a :class:`LaurentQ`."""
    text = text.strip()
    if "q" in text:
        return parse_laurent(text)
    return Fraction(text.replace(" ", ""))


def format_scalar(x) -> str:
    if isinstance(x, LaurentQ):
        return format_laurent(x)
    return format_fraction(x)


# -- ground field ----------------------------------------------------------

@dataclass(frozen=True)
class ScalarField:
    """Where ranks are computed.

    ``specialized`` evaluates q at ``q0`` and re-checks at ``q_check``;
    ``symbolic`` eliminates fraction-free over Q[q, q^-1].
    """

    mode: str = "specialized"
    q0: Fraction = Fraction(2)
    q_check: Fraction | None = Fraction(3, 2)

    def __post_init__(self):
        if self.mode not in ("specialized", "symbolic"):
            raise ValueError(f"unknown field mode {self.mode!r}")
        if self.mode == "specialized":
            object.__setattr__(self, "q0", check_q0(self.q0))
            if self.q_check is not None:
                object.__setattr__(self, "q_check", check_q0(self.q_check))

    @classmethod
    def symbolic(cls) -> ScalarField:
        return cls(mode="symbolic", q_check=None)

    @property
    def points(self) -> tuple[Fraction, ...]:
        if self.mode == "symbolic":
            return ()
        if self.q_check is None or self.q_check == self.q0:
            return (self.q0,)
        return (self.q0, self.q_check)


def check_q0(q0) -> Fraction:
    """Reject q0 in {0, 1, -1}; ``|q0| != 1`` also rules out roots of unity in Q."""
    q0 = as_fraction(q0)
    if q0 == 0 or abs(q0) == 1:
        raise InvalidSpecialization(f"q0 = {format_fraction(q0)} is not generic")
    return q0
