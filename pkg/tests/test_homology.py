from fractions import Fraction
from math import comb
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qhom.homology import (ChainDimTooLarge, FieldMismatch, GradedComplex, TwistedBimodule,
                           build_koszul_complex, duality_check_B, expected_syzygy_dims,
                           homology_dims, koszul_syzygies, koszul_table, kunneth_mismatches,
                           laurent_complex, tensor_complexes)
from qhom.linalg import SparseMatrix, rank_q
from qhom.qalgebras import build_matrix_algebra, modular_sigma
from qhom.quadratic import matrix_quadratic_data

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def twisted2():
    return koszul_table(2, "sigma", 8, Fraction(2))


@pytest.fixture(scope="module")
def untwisted2():
    return koszul_table(2, "none", 8, Fraction(2))


def test_syzygies_n2(B2):
    syz = koszul_syzygies(matrix_quadratic_data(B2), 5)
    assert [s.dim for s in syz] == [1, 4, 6, 4, 1, 0]
    # K_2 is exactly the relation space
    k2 = [{w: c for w, c in v.items()} for v in syz[2].basis]
    rels = [{w: Fraction(c) for w, c in r.terms.items()} for r in B2.relations]
    words = sorted({w for v in k2 + rels for w in v})
    idx = {w: i for i, w in enumerate(words)}
    a = [{idx[w]: c for w, c in v.items()} for v in k2]
    b = [{idx[w]: c for w, c in v.items()} for v in rels]
    assert rank_q(a) == rank_q(b) == rank_q(a + b) == 6


def test_syzygies_n3(B3):
    syz = koszul_syzygies(matrix_quadratic_data(B3), 3)
    assert [s.dim for s in syz] == [1, 9, 36, 84] == expected_syzygy_dims(3, 3)


def test_chain_dims_and_d_squared(twisted2):
    table, c, _ = twisted2
    assert c.dims[4, 4] == 1
    assert c.dims[2, 3] == 24
    assert c.check_d_squared() == []
    for (n, d), m in c.diffs.items():
        if n >= 2:
            assert (c.diffs[n - 1, d] @ m).is_zero()


def test_top_row_twisted(twisted2):
    table, _, _ = twisted2
    assert [table.entries[4, d] for d in range(4, 9)] == [1, 0, 1, 0, 1]


def test_dimension_drop(twisted2, untwisted2):
    a, b = untwisted2[0].row(4), twisted2[0].row(4)
    assert all(x <= y for x, y in zip(a, b))
    assert any(x < y for x, y in zip(a, b))


def test_rank_nullity_and_euler(twisted2, untwisted2):
    for table in (twisted2[0], untwisted2[0]):
        assert table.euler_ok()
        for key, dim in table.chain_dims.items():
            assert table.rank_out[key] + table.rank_in[key] <= dim
            assert table.entries[key] >= 0


def test_two_points_agree(twisted2):
    other, _, _ = koszul_table(2, "sigma", 8, Fraction(3, 2))
    assert other.entries == twisted2[0].entries


def test_duality_rows(twisted2):
    rows = duality_check_B(2, 8, table=twisted2[0])
    got = {r.d: (r.homology, r.center) for r in rows}
    assert got[6] == (1, 1) and got[5] == (0, 0) and got[4] == (1, 1)
    assert all(r.ok for r in rows)


def test_commutative_limit_matches_hkr():
    # at q = 1 the algebra is a polynomial ring: every differential vanishes and
    # H_n at internal degree d is B_{d-n} (x) exterior^n V
    B = build_matrix_algebra(2, q=Fraction(1))
    syz = koszul_syzygies(matrix_quadratic_data(B), 4)
    c = build_koszul_complex(TwistedBimodule(B, modular_sigma(B)), syz, 6)
    assert all(m.is_zero() for m in c.diffs.values())
    t = homology_dims(c)
    for (n, d), v in t.entries.items():
        assert v == comb(d - n + 3, 3) * comb(4, n)


def test_n1_polynomial_ring():
    t, _, _ = koszul_table(1, "sigma", 5, Fraction(2))
    assert t.row(0) == [1] * 6
    assert t.row(1) == [0] + [1] * 5


def test_degree_zero_only():
    t, _, _ = koszul_table(2, "sigma", 0, Fraction(2))
    assert t.entries == {(0, 0): 1}


def test_zero_complex():
    t = homology_dims(GradedComplex())
    assert t.entries == {}
    z = tensor_complexes(laurent_complex(0, 0), GradedComplex(q0=Fraction(2), degrees=[0]))
    assert all(v == 0 for v in z.dims.values())


def test_chain_limit():
    with pytest.raises(ChainDimTooLarge):
        koszul_table(2, "sigma", 8, Fraction(2), chain_limit=10)


def test_partial_n3():
    t, c, syz = koszul_table(3, "sigma", 5, Fraction(2), n_max=3)
    assert t.partial and t.max_n == 3 and t.euler_ok() is None
    assert [s.dim for s in syz] == [1, 9, 36, 84, 126]
    assert c.check_d_squared() == []
    other, _, _ = koszul_table(3, "sigma", 5, Fraction(3, 2), n_max=3)
    assert other.entries == t.entries


def test_laurent():
    L = laurent_complex(-3, 3)
    assert all(m.is_zero() for m in L.diffs.values())
    h = homology_dims(L)
    assert h.row(0) == [1] * 7 and h.row(1) == [1] * 7
    assert h.top_nonzero() == 1


@pytest.mark.parametrize("s", [Fraction(4), Fraction(1), Fraction(-1), Fraction(9, 4)])
def test_twisted_laurent_hand_oracle(s):
    # d(t^(d-1) e) = t^(d-1) (s t) - t t^(d-1) = (s - 1) t^d : kernel is 1-dim iff s == 1
    h = homology_dims(laurent_complex(-2, 2, twist_scalar=s))
    want = 1 if s == 1 else 0
    assert h.row(0) == [want] * 5 and h.row(1) == [want] * 5


def test_tensor_laurent_laurent():
    L = laurent_complex(-2, 2)
    T = tensor_complexes(L, L)
    h = homology_dims(T)
    for a in range(-2, 3):
        for b in range(-2, 3):
            assert [h.entries[n, (a, b)] for n in range(3)] == [1, 2, 1]
    assert kunneth_mismatches(L, L) == []


def test_kunneth_with_koszul():
    kt, kc, _ = koszul_table(2, "sigma", 4, Fraction(2))
    L = laurent_complex(-1, 1)
    assert kunneth_mismatches(L, kc, h2=kt) == []


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        tensor_complexes(laurent_complex(q0=Fraction(2)), laurent_complex(q0=Fraction(3, 2)))


def test_csv_layout(twisted2):
    text = twisted2[0].to_csv()
    assert text.splitlines()[0] == "n,d,chainDim,rankOut,rankIn,homDim"
    assert "4,6,10,9,0,1" in text.splitlines()


@pytest.mark.parametrize("twist", ["sigma", "none"])
def test_golden_tables(twist, twisted2, untwisted2):
    t = (twisted2 if twist == "sigma" else untwisted2)[0]
    assert t.to_csv() == (GOLDEN / f"homology_N2_{twist}_d8.csv").read_text()
    assert t.to_json() + "\n" == (GOLDEN / f"homology_N2_{twist}_d8.table.json").read_text()


@st.composite
def two_term_complexes(draw):
    degs = [0, 1]
    dims, diffs = {}, {}
    for d in degs:
        a, b = draw(st.integers(0, 3)), draw(st.integers(0, 3))
        dims[0, d], dims[1, d] = a, b
        ent = {(i, j): Fraction(draw(st.integers(-2, 2))) for i in range(a) for j in range(b)}
        diffs[1, d] = SparseMatrix(a, b, {k: v for k, v in ent.items() if v})
    return GradedComplex(dims, diffs, Fraction(2), 1, degs)


@given(two_term_complexes(), two_term_complexes())
def test_kunneth_random(c1, c2):
    assert kunneth_mismatches(c1, c2) == []
    assert tensor_complexes(c1, c2).check_d_squared() == []
