"""Words and noncommutative polynomials over an ordered set of generators.

A word is a tuple of generator indices; the index *is* the sort key, so the
default degree-lexicographic order is ``(len(w), w)``.  Coefficients are any
exact scalars (``Fraction`` or :class:`~qhom.scalars.LaurentQ`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import format_scalar, parse_scalar

Word = tuple


class IncompatibleAlgebra(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    sort_key: int


class GeneratorSet:
    """Ordered, uniquely named generators.  Position in ``names`` is the sort key."""

    __slots__ = ("names", "_index")

    def __init__(self, names):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        for n in names:
            if not n or "." in n or " " in n:
                raise ValueError(f"bad generator name {n!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.generators())

    def __eq__(self, other):
        return isinstance(other, GeneratorSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"GeneratorSet({list(self.names)})"

    def generators(self) -> list[Generator]:
        return [Generator(n, i) for i, n in enumerate(self.names)]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown generator {name!r}") from None

    def word(self, *names: str) -> Word:
        return tuple(self.index(n) for n in names)

    def word_str(self, w: Word) -> str:
        return ".".join(self.names[i] for i in w) if w else "1"

    def parse_word(self, text: str) -> Word:
        text = text.strip()
        if text == "1":
            return ()
        return tuple(self.index(n) for n in text.split("."))


def order_key(w: Word):
    return (len(w), w)


def monomial_order_cmp(w1: Word, w2: Word) -> int:
    """Degree-lex comparison: -1, 0 or 1."""
    k1, k2 = order_key(w1), order_key(w2)
    return (k1 > k2) - (k1 < k2)


class NCPoly:
    """Finitely supported map ``Word -> scalar`` over a :class:`GeneratorSet`."""

    __slots__ = ("gens", "terms")

    def __init__(self, gens: GeneratorSet, terms=None):
        self.gens = gens
        self.terms = {}
        if terms:
            for w, c in dict(terms).items():
                if c:
                    self.terms[tuple(w)] = c

    @classmethod
    def _raw(cls, gens, terms):
        obj = cls.__new__(cls)
        obj.gens = gens
        obj.terms = terms
        return obj

    @classmethod
    def monomial(cls, gens, word, coeff=1) -> NCPoly:
        return cls(gens, {tuple(word): coeff})

    @classmethod
    def gen(cls, gens: GeneratorSet, name: str) -> NCPoly:
        return cls._raw(gens, {(gens.index(name),): Fraction(1)})

    @classmethod
    def one(cls, gens) -> NCPoly:
        return cls._raw(gens, {(): Fraction(1)})

    @classmethod
    def zero(cls, gens) -> NCPoly:
        return cls._raw(gens, {})

    def _check(self, other):
        if isinstance(other, NCPoly):
            if other.gens != self.gens:
                raise IncompatibleAlgebra(f"{self.gens} vs {other.gens}")
            return other
        return NCPoly._raw(self.gens, {(): other} if other else {})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.gens == other.gens and self.terms == other.terms
        if not other:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __add__(self, other):
        other = self._check(other)
        return NCPoly._raw(self.gens, add_terms(self.terms, other.terms, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return NCPoly._raw(self.gens, add_terms(self.terms, other.terms, -1))

    def __rsub__(self, other):
        return self._check(other) - self

    def __neg__(self):
        return NCPoly._raw(self.gens, {w: -c for w, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, NCPoly):
            return self.scale(other)
        other = self._check(other)
        return NCPoly._raw(self.gens, mul_terms(self.terms, other.terms))

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        out = NCPoly.one(self.gens)
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c) -> NCPoly:
        if not c:
            return NCPoly.zero(self.gens)
        return NCPoly._raw(self.gens, {w: c * v for w, v in self.terms.items() if c * v})

    def words(self) -> list[Word]:
        """Support in descending degree-lex order."""
        return sorted(self.terms, key=order_key, reverse=True)

    def leading(self):
        w = max(self.terms, key=order_key)
        return w, self.terms[w]

    def coeff(self, w: Word):
        return self.terms.get(tuple(w), 0)

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self.terms}) <= 1

    def map_coeffs(self, f) -> NCPoly:
        return NCPoly(self.gens, {w: f(c) for w, c in self.terms.items()})

    def __str__(self):
        return format_ncpoly(self)

    def __repr__(self):
        return f"NCPoly({format_ncpoly(self)!r})"


def add_terms(a: dict, b: dict, sign=1) -> dict:
    out = dict(a)
    for w, c in b.items():
        s = out.get(w, 0) + (c if sign == 1 else -c)
        if s:
            out[w] = s
        else:
            out.pop(w, None)
    return out


def mul_terms(a: dict, b: dict) -> dict:
    out: dict = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            w = w1 + w2
            s = out.get(w, 0) + c1 * c2
            if s:
                out[w] = s
            else:
                out.pop(w, None)
    return out


def poly_arith(a: NCPoly, b, op: str) -> NCPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown op {op!r}")


# -- text grammar: ``coeff * g1.g2 + coeff * 1`` ------------------------------

def format_ncpoly(p: NCPoly) -> str:
    if not p.terms:
        return "0"
    out = []
    for w in p.words():
        c = format_scalar(p.terms[w])
        if " " in c or ("q" in c and c.startswith("-")):
            c = f"({c})"
        out.append(f"{c} * {p.gens.word_str(w)}")
    return " + ".join(out)


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur, i = [], 0, [], 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            parts.append("".join(cur))
            cur = []
            i += len(sep)
            continue
        cur.append(ch)
        i += 1
    parts.append("".join(cur))
    return parts


def parse_ncpoly(text: str, gens: GeneratorSet) -> NCPoly:
    """Inverse of :func:`format_ncpoly`; also accepts ``-`` between terms and bare words."""
    text = text.strip()
    if text == "0":
        return NCPoly.zero(gens)
    terms: dict = {}
    pieces = []
    for chunk in _split_top(text, " + "):
        sub = _split_top(chunk, " - ")
        pieces.append((1, sub[0]))
        pieces.extend((-1, s) for s in sub[1:])
    for sign, piece in pieces:
        piece = piece.strip()
        if " * " in piece:
            ctext, wtext = piece.rsplit(" * ", 1)
            ctext = ctext.strip()
            if ctext.startswith("(") and ctext.endswith(")"):
                ctext = ctext[1:-1]
            coeff = parse_scalar(ctext)
        else:
            wtext = piece
            if wtext.startswith("-"):
                sign, wtext = -sign, wtext[1:]
            coeff = Fraction(1)
        w = gens.parse_word(wtext)
        c = coeff if sign == 1 else -coeff
        s = terms.get(w, 0) + c
        if s:
            terms[w] = s
        else:
            terms.pop(w, None)
    return NCPoly._raw(gens, terms)
