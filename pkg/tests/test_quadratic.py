import itertools
from fractions import Fraction
from math import comb

import pytest
import sympy

from qhom.freealg import GeneratorSet, NCPoly
from qhom.qalgebras import build_matrix_algebra, modular_sigma
from qhom.quadratic import (ConventionMismatch, FiniteGradedAlgebra, NakayamaData, QuadraticData,
                            build_dual_algebra, check_frobenius, check_nakayama_identity,
                            dual_names, dual_relations, frobenius_certificate,
                            frobenius_functional, matrix_quadratic_data, nakayama, pairing,
                            pairing_matrix, quadratic_dual, random_complementary_pairs,
                            same_relation_space, sigma_exponent_grid, sigma_from_nakayama)
from qhom.rewrite import check_confluence, orient
from qhom.scalars import Q, ScalarField

Q0 = Fraction(2)


def hand_dual(B, N, q):
    gens = GeneratorSet(dual_names(N))
    return QuadraticData(gens, dual_relations(N, gens, q))


@pytest.mark.parametrize("N,dims", [(1, (0, 1)), (2, (6, 10)), (3, (36, 45))])
def test_orthogonal_complement(N, dims):
    B = build_matrix_algebra(N, q=Q0)
    qd = matrix_quadratic_data(B)
    dual = quadratic_dual(qd, dual_names(N))
    assert (len(qd.relations), len(dual.relations)) == dims
    assert sum(dims) == N ** 4
    for s in dual.relations:
        for r in qd.relations:
            assert pairing(s, r) == 0
    cmp = same_relation_space(dual, hand_dual(B, N, Q0))
    assert cmp["aInB"] and cmp["bInA"] and cmp["equal"]


def test_n1_dual_is_square_zero():
    B = build_matrix_algebra(1, q=Q0)
    dual = quadratic_dual(matrix_quadratic_data(B), ["uhat11"])
    (r,) = dual.relations
    assert set(r.terms) == {(0, 0)}


def test_orthogonality_against_sympy(B2):
    # independent nullspace of the 6 x 16 relation matrix
    qd = matrix_quadratic_data(B2)
    M = sympy.Matrix([[sympy.Rational(str(v.get(k, 0))) for k in range(16)] for v in qd.vectors()])
    ns = M.nullspace()
    assert len(ns) == 10
    ours = quadratic_dual(qd)
    vecs = [[ours.relations[i].terms.get((k // 4, k % 4), 0) for k in range(16)]
            for i in range(10)]
    both = sympy.Matrix([[sympy.Rational(str(x)) for x in v] for v in vecs] + [list(n.T) for n in ns])
    assert both.rank() == 10


def test_dual_algebra_n2(dual2sym):
    D = dual2sym
    assert D.graded_dims() == [1, 4, 6, 4, 1] and len(D) == 16
    w = D.gens.word("uhat11", "uhat11")
    assert D.system.reduce_word(w) == {}
    assert D.top_word() == D.gens.word("uhat11", "uhat12", "uhat21", "uhat22")


def test_dual_algebra_n3(dual3):
    assert len(dual3) == 512
    assert dual3.graded_dims() == [comb(9, n) for n in range(10)]
    assert dual3.top_word() == tuple(range(9))


def test_frobenius_functional(dual2sym):
    D = dual2sym
    h = frobenius_functional(D)
    assert h({D.top_word(): 1}) == 1
    assert h({(): 1}) == 0
    rev = D.gens.word("uhat22", "uhat21", "uhat12", "uhat11")
    val = h(D.system.reduce_word(rev))
    assert val == Q ** 4  # four row/column swaps at q^-1 each, sign cancels
    assert val == D.system.reduce_word(rev)[D.top_word()]


def test_pairing_blocks_and_ranks(dual2sym, dual2):
    h = frobenius_functional(dual2sym)
    cert = frobenius_certificate(dual2sym, h, ScalarField.symbolic())
    assert cert.sizes == [1, 4, 6, 4, 1] and cert.ok
    # degree-mismatched products never hit the top word
    D = dual2
    for x in D.by_degree[1]:
        for y in D.by_degree[2]:
            assert frobenius_functional(D)(D.multiply_words(D.basis[x], D.basis[y])) == 0
    # full 16 x 16 pairing matrix over all basis pairs
    hh = frobenius_functional(D)
    M = [[hh(D.multiply_words(D.basis[x], D.basis[y])) for y in range(16)] for x in range(16)]
    from qhom.linalg import rank_q
    assert rank_q(M) == 16


def test_frobenius_n3(dual3):
    cert = frobenius_certificate(dual3, frobenius_functional(dual3))
    assert cert.ok and max(cert.sizes) == 126


def test_exterior_algebra_toy():
    G = GeneratorSet(["x", "y"])
    x, y = NCPoly.gen(G, "x"), NCPoly.gen(G, "y")
    sys = orient([x * x, y * y, x * y + y * x], G)
    assert check_confluence(sys).all_resolved
    basis = sys.normal_words_upto(3)
    E = FiniteGradedAlgebra(sys, basis, Fraction(1))
    assert E.graded_dims() == [1, 2, 1]
    assert check_frobenius(E, frobenius_functional(E))


@pytest.mark.parametrize("q0", [Fraction(2), Fraction(3, 2)])
def test_nakayama_n2(q0):
    D = build_dual_algebra(2, q=q0)
    h = frobenius_functional(D)
    nk = nakayama(D, h)
    assert nk.diagonal
    assert nk.exponent_grid(2) == [[2, 0], [0, -2]]
    assert set(nk.signs.values()) == {-1}
    assert check_nakayama_identity(D, h, nk) == 0


def test_nakayama_pattern_matches_sigma_up_to_convention():
    # e_ij = c + s * 2(N+1-i-j) for a global c and s
    D = build_dual_algebra(2, q=Q0)
    nk = nakayama(D, frobenius_functional(D))
    grid, ref = nk.exponent_grid(2), sigma_exponent_grid(2)
    fits = [(c, s) for c in range(-4, 5) for s in (1, -1)
            if all(grid[i][j] == c + s * ref[i][j] for i in range(2) for j in range(2))]
    assert fits == [(0, 1)]


def test_nakayama_q1_is_sign_identity():
    D = build_dual_algebra(2, q=Fraction(1))
    nk = nakayama(D, frobenius_functional(D))
    assert nk.diagonal and set(nk.exponents.values()) == {0}
    assert len(set(nk.signs.values())) == 1


def test_nakayama_n3(dual3):
    h = frobenius_functional(dual3)
    nk = nakayama(dual3, h)
    assert nk.diagonal
    assert nk.exponent_grid(3) == [[4, 2, 0], [2, 0, -2], [0, -2, -4]]
    pairs = random_complementary_pairs(dual3, 500, seed=0)
    assert check_nakayama_identity(dual3, h, nk, pairs) == 0


@pytest.mark.parametrize("N", [2, 3])
def test_sigma_from_nakayama(N, B2, B3, dual2, dual3):
    B, D = (B2, dual2) if N == 2 else (B3, dual3)
    nk = nakayama(D, frobenius_functional(D))
    f = sigma_from_nakayama(nk, B)
    ref = modular_sigma(B)
    for n in B.gens.names:
        assert f.images[n] == ref.images[n]
    if N == 2:
        assert f.images["u11"] == B.gen("u11").scale(Q0 ** 2)
        assert f.images["u22"] == B.gen("u22").scale(Q0 ** -2)
        assert f.images["u12"] == B.gen("u12")


def test_convention_mismatch_detected(B2):
    bad = NakayamaData({}, True, {(1, 1): 2, (1, 2): 0, (2, 1): 2, (2, 2): -2},
                       {k: -1 for k in itertools.product((1, 2), repeat=2)}, Q0)
    with pytest.raises(ConventionMismatch):
        sigma_from_nakayama(bad, B2)


def test_pairing_matrix_shape(dual2):
    h = frobenius_functional(dual2)
    assert [len(pairing_matrix(dual2, h, n)) for n in range(5)] == [1, 4, 6, 4, 1]
