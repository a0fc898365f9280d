"""Oriented rewriting systems, normal forms and diamond-lemma certification."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from .freealg import GeneratorSet, NCPoly, Word, add_terms, order_key, parse_ncpoly
from .scalars import invert


class AmbiguousOrientation(ValueError):
    pass


class NotGraded(ValueError):
    pass


class UncertifiedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: dict  # Word -> coefficient, every word smaller than lhs

    def __post_init__(self):
        if not self.lhs:
            raise ValueError("rule with empty left-hand side")
        k = order_key(self.lhs)
        for w in self.rhs:
            if order_key(w) >= k:
                raise ValueError(f"rhs word {w} not below lhs {self.lhs}")

    def is_homogeneous(self, weights=None) -> bool:
        wt = _weight_fn(weights)
        return all(wt(w) == wt(self.lhs) for w in self.rhs)


def _weight_fn(weights):
    if weights is None:
        return len
    return lambda w: sum(weights[i] for i in w)


@dataclass
class Overlap:
    word: Word
    rules: tuple  # (i, j) rule indices
    kind: str  # "overlap" or "inclusion"
    discrepancy: dict

    @property
    def resolved(self) -> bool:
        return not self.discrepancy


@dataclass
class ConfluenceReport:
    overlaps: list = field(default_factory=list)

    @property
    def overlap_count(self) -> int:
        return len(self.overlaps)

    @property
    def all_resolved(self) -> bool:
        return all(o.resolved for o in self.overlaps)

    def unresolved(self):
        return [o for o in self.overlaps if not o.resolved]

    def to_json(self, gens: GeneratorSet) -> dict:
        return {
            "overlapCount": self.overlap_count,
            "allResolved": self.all_resolved,
            "overlaps": [
                {
                    "word": gens.word_str(o.word),
                    "rules": list(o.rules),
                    "kind": o.kind,
                    "resolved": o.resolved,
                    "discrepancy": str(NCPoly(gens, o.discrepancy)),
                }
                for o in self.overlaps
            ],
        }


@dataclass(frozen=True)
class ConfluenceCertificate:
    overlap_count: int
    all_resolved: bool


class RewriteSystem:
    """Rules over a generator set, with a word-level normal-form cache.

    Reduction rewrites the leftmost occurrence of any left-hand side; on a
    certified system the result does not depend on that choice.
    """

    def __init__(self, gens: GeneratorSet, rules):
        self.gens = gens
        self.rules = list(rules)
        self._lhs = {}
        for r in self.rules:
            if r.lhs in self._lhs:
                raise AmbiguousOrientation(f"duplicate lhs {gens.word_str(r.lhs)}")
            self._lhs[r.lhs] = r.rhs
        self._lengths = sorted({len(r.lhs) for r in self.rules})
        self._maxlen = max(self._lengths, default=0)
        self.certificate: ConfluenceCertificate | None = None
        self._nf: dict = {}
        self._normal_by_len: dict = {0: [()]}

    def __repr__(self):
        return f"RewriteSystem({len(self.gens)} generators, {len(self.rules)} rules)"

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.all_resolved

    def rule_strings(self) -> list[str]:
        return [f"{self.gens.word_str(r.lhs)} -> {NCPoly(self.gens, r.rhs)}" for r in self.rules]

    # -- reduction -----------------------------------------------------------

    def find_redex(self, w: Word):
        """Leftmost (position, lhs) occurrence in ``w``, or None."""
        lhs = self._lhs
        n = len(w)
        for i in range(n):
            for L in self._lengths:
                if i + L > n:
                    break
                if w[i:i + L] in lhs:
                    return i, w[i:i + L]
        return None

    def is_normal(self, w: Word) -> bool:
        return self.find_redex(w) is None

    def reduce_word(self, w: Word) -> dict:
        """Normal form of a single word.  The returned dict must not be mutated."""
        hit = self._nf.get(w)
        if hit is not None:
            return hit
        red = self.find_redex(w)
        if red is None:
            out = {w: 1}
        else:
            i, lhs = red
            pre, post = w[:i], w[i + len(lhs):]
            out = {}
            for v, c in self._lhs[lhs].items():
                for u, d in self.reduce_word(pre + v + post).items():
                    s = out.get(u, 0) + c * d
                    if s:
                        out[u] = s
                    else:
                        out.pop(u, None)
        self._nf[w] = out
        return out

    def reduce_terms(self, terms: dict) -> dict:
        out: dict = {}
        for w in sorted(terms, key=order_key, reverse=True):
            c = terms[w]
            for u, d in self.reduce_word(w).items():
                s = out.get(u, 0) + c * d
                if s:
                    out[u] = s
                else:
                    out.pop(u, None)
        return out

    def normal_form(self, p: NCPoly) -> NCPoly:
        if p.gens != self.gens:
            raise ValueError("polynomial over a different generator set")
        if not self.certified:
            warnings.warn("normal form in an uncertified system may be order-dependent",
                          UncertifiedWarning, stacklevel=2)
        return NCPoly._raw(self.gens, self.reduce_terms(p.terms))

    def multiply(self, a: dict, b: dict) -> dict:
        """Product of two normal-form term dicts, reduced."""
        out: dict = {}
        for w1, c1 in a.items():
            for w2, c2 in b.items():
                for u, d in self.reduce_word(w1 + w2).items():
                    s = out.get(u, 0) + c1 * c2 * d
                    if s:
                        out[u] = s
                    else:
                        out.pop(u, None)
        return out

    # -- bases ---------------------------------------------------------------

    def normal_words(self, d: int) -> list[Word]:
        """Normal words of length ``d`` in ascending order."""
        cache = self._normal_by_len
        top = max(cache)
        while top < d:
            nxt = []
            for w in cache[top]:
                for g in range(len(self.gens)):
                    u = w + (g,)
                    if not self._suffix_reducible(u):
                        nxt.append(u)
            top += 1
            cache[top] = sorted(nxt)
        return cache[d]

    def normal_words_upto(self, d: int) -> list[Word]:
        out = []
        for k in range(d + 1):
            out.extend(self.normal_words(k))
        return out

    def _suffix_reducible(self, u: Word) -> bool:
        n = len(u)
        for L in self._lengths:
            if L > n:
                break
            if u[n - L:] in self._lhs:
                return True
        return False

    def is_graded(self, weights=None) -> bool:
        return all(r.is_homogeneous(weights) for r in self.rules)

    def graded_dimension(self, d: int) -> int:
        if not self.is_graded():
            raise NotGraded("rules are not homogeneous in word length")
        return len(self.normal_words(d))


def orient(relations, gens: GeneratorSet) -> RewriteSystem:
    """Turn each relation ``p = 0`` into ``lead(p) -> lower terms``."""
    rules: dict = {}
    for p in relations:
        p = p if isinstance(p, NCPoly) else NCPoly(gens, p)
        if p.gens != gens:
            raise ValueError("relation over a different generator set")
        if not p:
            continue
        lhs, c = p.leading()
        inv = invert(c)
        rhs = {w: -inv * v for w, v in p.terms.items() if w != lhs}
        rhs = {w: v for w, v in rhs.items() if v}
        if lhs in rules:
            if rules[lhs] != rhs:
                raise AmbiguousOrientation(
                    f"two relations lead with {gens.word_str(lhs)} and disagree: "
                    f"{NCPoly(gens, rules[lhs])} vs {NCPoly(gens, rhs)}")
            continue
        rules[lhs] = rhs
    return RewriteSystem(gens, [RewriteRule(l, r) for l, r in rules.items()])


def normal_form(p: NCPoly, sys: RewriteSystem) -> NCPoly:
    return sys.normal_form(p)


def graded_dimension(sys: RewriteSystem, d: int) -> int:
    return sys.graded_dimension(d)


def _occurrences(big: Word, small: Word):
    n, m = len(big), len(small)
    return [i for i in range(n - m + 1) if big[i:i + m] == small]


def check_confluence(sys: RewriteSystem) -> ConfluenceReport:
    """Reduce every overlap and inclusion ambiguity both ways; certify on success."""
    report = ConfluenceReport()
    rules = sys.rules
    for i, r1 in enumerate(rules):
        L1 = r1.lhs
        for j, r2 in enumerate(rules):
            L2 = r2.lhs
            # suffix of L1 equals prefix of L2
            for k in range(1, min(len(L1), len(L2))):
                if L1[-k:] != L2[:k]:
                    continue
                word = L1 + L2[k:]
                left = {v + L2[k:]: c for v, c in r1.rhs.items()}
                right = {L1[:-k] + v: c for v, c in r2.rhs.items()}
                disc = add_terms(sys.reduce_terms(left), sys.reduce_terms(right), -1)
                report.overlaps.append(Overlap(word, (i, j), "overlap", disc))
            # L2 strictly inside L1
            if i != j and len(L2) < len(L1):
                for p in _occurrences(L1, L2):
                    left = dict(r1.rhs)
                    right = {L1[:p] + v + L1[p + len(L2):]: c for v, c in r2.rhs.items()}
                    disc = add_terms(sys.reduce_terms(left), sys.reduce_terms(right), -1)
                    report.overlaps.append(Overlap(L1, (i, j), "inclusion", disc))
    sys.certificate = ConfluenceCertificate(report.overlap_count, report.all_resolved)
    return report


def describe_rules(sys: RewriteSystem) -> list[dict]:
    return [{"lhs": sys.gens.word_str(r.lhs),
             "rhs": str(NCPoly(sys.gens, r.rhs))} for r in sys.rules]


def format_presentation(sys: RewriteSystem) -> str:
    """Text form: a ``generators:`` header in order, then one ``lhs -> rhs`` rule per line."""
    lines = ["generators: " + " ".join(sys.gens.names), "rules:"]
    lines += [f"  {line}" for line in sys.rule_strings()]
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> RewriteSystem:
    """Inverse of :func:`format_presentation`.  Rules keep their written orientation."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].startswith("generators:"):
        raise ValueError("presentation must start with a 'generators:' line")
    gens = GeneratorSet(lines[0][len("generators:"):].split())
    if len(lines) < 2 or lines[1] != "rules:":
        raise ValueError("expected a 'rules:' line after the generators")
    rules = []
    for ln in lines[2:]:
        if " -> " not in ln:
            raise ValueError(f"rule without ' -> ': {ln!r}")
        lhs, rhs = ln.split(" -> ", 1)
        rules.append(RewriteRule(gens.parse_word(lhs), dict(parse_ncpoly(rhs, gens).terms)))
    return RewriteSystem(gens, rules)


__all__ = [
    "AmbiguousOrientation", "ConfluenceReport", "NotGraded", "Overlap", "RewriteRule",
    "RewriteSystem", "UncertifiedWarning", "check_confluence", "describe_rules",
    "format_presentation", "parse_presentation",
    "graded_dimension", "normal_form", "orient",
]
