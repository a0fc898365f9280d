import itertools
import warnings
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhom.freealg import GeneratorSet, NCPoly
from qhom.qalgebras import build_matrix_algebra, build_special_algebra, quantum_determinant
from qhom.quadratic import build_dual_algebra
from qhom.rewrite import (AmbiguousOrientation, NotGraded, RewriteSystem, UncertifiedWarning,
                          check_confluence, format_presentation, graded_dimension, normal_form,
                          orient, parse_presentation)
from qhom.scalars import Q

G = GeneratorSet("abcd")


def g(n):
    return NCPoly.gen(G, n)


def test_orient_row_relation():
    sys = orient([g("c") * g("d") - g("d") * g("c") * Q], G)
    (r,) = sys.rules
    assert r.lhs == G.word("d", "c")
    assert r.rhs == {G.word("c", "d"): Q ** -1}


def test_orient_mixed_relation():
    sys = orient([g("a") * g("d") - g("d") * g("a") - g("b") * g("c") * (Q - Q ** -1)], G)
    (r,) = sys.rules
    assert r.lhs == G.word("d", "a")
    assert r.rhs == {G.word("a", "d"): 1, G.word("b", "c"): -(Q - Q ** -1)}


def test_orient_square_zero():
    H = GeneratorSet(["uhat11"])
    sys = orient([NCPoly.gen(H, "uhat11") * NCPoly.gen(H, "uhat11")], H)
    assert sys.rules[0].rhs == {}


def test_orient_ambiguous():
    with pytest.raises(AmbiguousOrientation):
        orient([g("b") * g("a") - g("c"), g("b") * g("a") - g("d")], G)
    # proportional duplicates are fine
    assert len(orient([g("b") * g("a") - g("c"), (g("b") * g("a") - g("c")) * 3], G).rules) == 1


def test_normal_form_examples(B2sym):
    B = B2sym
    a, b, c, d = (B.gen(n) for n in ("u11", "u12", "u21", "u22"))
    assert B.nf(d * c) == c * d * Q ** -1
    assert B.nf(d * a) == a * d - b * c * (Q - Q ** -1)
    det = quantum_determinant(2, B.gens, Q)
    assert not B.nf(det * b - b * det)
    assert normal_form(d * c, B.system) == c * d * Q ** -1


def test_uncertified_warning():
    sys = orient([g("b") * g("a") - g("a") * g("b")], G)
    with pytest.warns(UncertifiedWarning):
        sys.normal_form(g("b") * g("a"))
    check_confluence(sys)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sys.normal_form(g("b") * g("a"))


def test_B2_overlaps_are_decreasing_triples(B2):
    # oracle: the ambiguities of "sort descending pairs" are the strictly decreasing triples
    triples = {w for w in itertools.product(range(4), repeat=3) if w[0] > w[1] > w[2]}
    rep = B2.report
    assert rep.overlap_count == 4 and rep.all_resolved
    assert {o.word for o in rep.overlaps} == triples


def test_dual_confluent_and_square_free():
    D = build_dual_algebra(2)
    assert D.report.all_resolved
    assert len(D) == 16
    assert all(len(set(w)) == len(w) for w in D.basis)


def test_special_algebra_confluent(A2sym):
    assert A2sym.report.all_resolved
    names = [A2sym.gens.word_str(r.lhs) for r in A2sym.system.rules]
    assert "u11.u22" in names


def test_graded_dimension_examples(B2, B3):
    assert graded_dimension(B2.system, 2) == 10
    assert build_dual_algebra(2).system.graded_dimension(2) == 6
    assert B3.system.graded_dimension(1) == 9


def test_not_graded(A2):
    with pytest.raises(NotGraded):
        A2.system.graded_dimension(2)


@pytest.mark.parametrize("N", [2, 3])
def test_pbw_counts(N, B2, B3):
    B = B2 if N == 2 else B3
    n = N * N
    for d in range(7):
        brute = sum(1 for _ in itertools.combinations_with_replacement(range(n), d))
        assert B.system.graded_dimension(d) == brute == comb(d + n - 1, d)


def test_unresolved_overlap_has_nonzero_discrepancy():
    # b.a -> a.b and c.b -> a : the overlap c.b.a does not resolve
    sys = orient([g("b") * g("a") - g("a") * g("b"), g("c") * g("b") - g("a")], G)
    rep = check_confluence(sys)
    assert not rep.all_resolved
    for o in rep.overlaps:
        assert bool(o.discrepancy) == (not o.resolved)
        if o.discrepancy:
            assert all(sys.is_normal(w) for w in o.discrepancy)


def normal_words_B2():
    B = build_matrix_algebra(2, q=Fraction(2))
    return B, B.system.normal_words_upto(3)


_B, _NW = normal_words_B2()
nw = st.sampled_from(_NW)
cf = st.fractions(min_value=-3, max_value=3, max_denominator=4)
any_words = st.lists(st.integers(0, 3), max_size=4).map(tuple)


@given(any_words)
def test_nf_idempotent(w):
    s = _B.system
    nf = s.reduce_word(w)
    assert s.reduce_terms(nf) == nf
    assert all(s.is_normal(u) for u in nf)


@given(any_words, any_words, cf, cf)
def test_nf_linear(u, v, x, y):
    s = _B.system
    assert s.reduce_terms({u: Fraction(0)}) == {}
    combined = {}
    for w, c in ((u, x), (v, y)):
        combined[w] = combined.get(w, 0) + c
    out = s.reduce_terms({w: c for w, c in combined.items() if c})
    sep = {}
    for w, c in ((u, x), (v, y)):
        for k, val in s.reduce_word(w).items():
            sep[k] = sep.get(k, 0) + c * val
    assert out == {k: val for k, val in sep.items() if val}


@given(nw, nw, nw)
def test_quotient_multiplication_associative(x, y, z):
    s = _B.system
    left = s.multiply(s.multiply({x: 1}, {y: 1}), {z: 1})
    right = s.multiply({x: 1}, s.multiply({y: 1}, {z: 1}))
    assert left == right


def test_rule_must_decrease():
    from qhom.rewrite import RewriteRule
    with pytest.raises(ValueError):
        RewriteRule(G.word("a", "b"), {G.word("b", "a"): 1})
    with pytest.raises(AmbiguousOrientation):
        RewriteSystem(G, [RewriteRule(G.word("b", "a"), {}), RewriteRule(G.word("b", "a"), {})])


@pytest.mark.parametrize("build", [lambda: build_matrix_algebra(2, q=Q),
                                   lambda: build_special_algebra(2, q=Q)])
def test_presentation_round_trip(build):
    sys = build().system
    text = format_presentation(sys)
    assert text.startswith("generators: ")
    back = parse_presentation(text)
    assert back.gens.names == sys.gens.names
    assert [(r.lhs, r.rhs) for r in back.rules] == [(r.lhs, r.rhs) for r in sys.rules]
    assert check_confluence(back).all_resolved


def test_presentation_rejects_bad_text():
    with pytest.raises(ValueError):
        parse_presentation("rules:\n")
    with pytest.raises(ValueError):
        parse_presentation("generators: x y\nrules:\n  y.x = x.y\n")
