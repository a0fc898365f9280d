"""Koszul complexes for Hochschild homology with twisted coefficients.

For a Koszul algebra B = T(V)/(R) the bimodule Koszul resolution has terms
B (x) K_n (x) B with K_n = intersection of V^i (x) R (x) V^(n-2-i).  Tensoring
with a bimodule M gives chains M (x) K_n and

    d(m (x) v1...vn) = m<v1 (x) v2...vn + (-1)^n vn>m (x) v1...v(n-1).

For M = B_sigma the right action is m<v = m sigma(v).  Internal degree of
M_e (x) K_n is e + n; differentials preserve it.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .linalg import SparseMatrix, nullspace, rank_q, rref
from .qalgebras import (AlgebraMap, PresentedAlgebra, build_laurent_algebra,
                        build_matrix_algebra, center_degree_dims, identity_map, modular_sigma)
from .quadratic import QuadraticData, matrix_quadratic_data
from .scalars import as_fraction, check_q0


class ComplexError(RuntimeError):
    pass


class FieldMismatch(ValueError):
    pass


class ChainDimTooLarge(MemoryError):
    pass


# -- syzygies --------------------------------------------------------------------

@dataclass
class SyzygySpace:
    """K_n as an RREF basis of vectors on V^(x)n (words as tuples)."""

    n: int
    basis: list  # list of {word: Fraction}
    pivots: list  # pivot word of each basis vector

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, vec: dict):
        """Coordinates in this basis, or None if ``vec`` is not in K_n."""
        rows = self.basis
        residual = {w: c for w, c in vec.items() if c}
        out = {}
        for k, (p, r) in enumerate(zip(self.pivots, rows)):
            a = residual.get(p)
            if a:
                out[k] = a
                for w, v in r.items():
                    s = residual.get(w, 0) - a * v
                    if s:
                        residual[w] = s
                    else:
                        residual.pop(w, None)
        if residual:
            return None
        return out


def _encode(w, n_gens):
    k = 0
    for x in w:
        k = k * n_gens + x
    return k


def _decode(k, n_gens, length):
    w = []
    for _ in range(length):
        k, r = divmod(k, n_gens)
        w.append(r)
    return tuple(reversed(w))


def _space_from_vectors(n, vecs, n_gens):
    rows = [{_encode(w, n_gens): Fraction(c) for w, c in v.items()} for v in vecs]
    red, piv = rref(rows)
    basis = [{_decode(k, n_gens, n): c for k, c in r.items()} for r in red]
    return SyzygySpace(n, basis, [_decode(p, n_gens, n) for p in piv])


def koszul_syzygies(qd: QuadraticData, n_max: int) -> list[SyzygySpace]:
    """K_0 .. K_nmax.  K_n = (K_{n-1} (x) V) meet (V^(n-2) (x) R), solved as a nullspace."""
    nv = len(qd.gens)
    out = [SyzygySpace(0, [{(): Fraction(1)}], [()])]
    if n_max >= 1:
        out.append(SyzygySpace(1, [{(a,): Fraction(1)} for a in range(nv)],
                               [(a,) for a in range(nv)]))
    if n_max < 2:
        return out[:n_max + 1]
    rel_vecs = [{w: as_fraction(c) for w, c in r.terms.items()} for r in qd.relations]
    out.append(_space_from_vectors(2, rel_vecs, nv))
    # functionals vanishing on R, as {(s, t): coeff}
    flat = [{w[0] * nv + w[1]: c for w, c in r.items()} for r in rel_vecs]
    perp = [{(k // nv, k % nv): c for k, c in v.items()} for v in nullspace(flat, nv * nv)]
    for n in range(3, n_max + 1):
        prev = out[-1]
        if prev.dim == 0:
            out.append(SyzygySpace(n, [], []))
            continue
        # unknown c[a, t]: x = sum c[a, t] k_a (x) t ; rows indexed by (prefix, phi)
        row_of: dict = {}
        rows: list[dict] = []
        for a, ka in enumerate(prev.basis):
            for w, kv in ka.items():
                prefix, s = w[:-1], w[-1]
                for f, phi in enumerate(perp):
                    for (s2, t), pc in phi.items():
                        if s2 != s:
                            continue
                        key = (prefix, f)
                        r = row_of.get(key)
                        if r is None:
                            r = row_of[key] = len(rows)
                            rows.append({})
                        col = a * nv + t
                        val = rows[r].get(col, 0) + pc * kv
                        if val:
                            rows[r][col] = val
                        else:
                            rows[r].pop(col, None)
        sol = nullspace(rows, prev.dim * nv)
        vecs = []
        for v in sol:
            x: dict = {}
            for col, c in v.items():
                a, t = divmod(col, nv)
                for w, kv in prev.basis[a].items():
                    u = w + (t,)
                    x[u] = x.get(u, 0) + c * kv
            vecs.append({w: c for w, c in x.items() if c})
        out.append(_space_from_vectors(n, vecs, nv))
    return out


def _splits(spaces: list[SyzygySpace]):
    """For each n >= 1 and basis vector b of K_n: k_b = sum_v v (x) L[b][v] = sum_v R[b][v] (x) v,
    with L, R given in K_{n-1} coordinates."""
    left, right = {}, {}
    for n in range(1, len(spaces)):
        lo = spaces[n - 1]
        ls, rs = [], []
        for b in spaces[n].basis:
            lparts: dict = {}
            rparts: dict = {}
            for w, c in b.items():
                lp = lparts.setdefault(w[0], {})
                lp[w[1:]] = lp.get(w[1:], 0) + c
                rp = rparts.setdefault(w[-1], {})
                rp[w[:-1]] = rp.get(w[:-1], 0) + c
            lc, rc = {}, {}
            for v, vec in lparts.items():
                co = lo.coords(vec)
                if co is None:
                    raise ComplexError(f"K_{n} does not split as V (x) K_{n - 1}")
                if co:
                    lc[v] = co
            for v, vec in rparts.items():
                co = lo.coords(vec)
                if co is None:
                    raise ComplexError(f"K_{n} does not split as K_{n - 1} (x) V")
                if co:
                    rc[v] = co
            ls.append(lc)
            rs.append(rc)
        left[n], right[n] = ls, rs
    return left, right


# -- complexes -------------------------------------------------------------------

@dataclass
class TwistedBimodule:
    """The algebra with left multiplication and right action through ``twist``."""

    algebra: PresentedAlgebra
    twist: AlgebraMap | None = None

    def scalars(self) -> dict:
        """Generator index -> twist scalar (diagonal twists only)."""
        if self.twist is None:
            return {k: 1 for k in range(len(self.algebra.gens))}
        d = self.twist.diagonal_scalars()
        if d is None:
            raise ValueError("only diagonal twists are supported")
        return {self.algebra.gens.index(n): c for n, c in d.items()}


@dataclass
class GradedComplex:
    """Chains indexed by (homological degree n, internal degree d).

    ``diffs[n, d]`` maps chains at (n, d) to chains at (n-1, d); columns are
    source basis elements.
    """

    dims: dict = field(default_factory=dict)
    diffs: dict = field(default_factory=dict)
    q0: Fraction | None = None
    n_max: int = 0
    degrees: list = field(default_factory=list)
    complete_top: bool = True  # False when chains above n_max were not built

    def check_d_squared(self) -> list:
        """(n, d) pairs where d_{n-1} d_n != 0."""
        bad = []
        for (n, d), m in self.diffs.items():
            lower = self.diffs.get((n - 1, d))
            if lower is None or m.is_zero():
                continue
            if not (lower @ m).is_zero():
                bad.append((n, d))
        return bad

    def rank(self, n, d) -> int:
        m = self.diffs.get((n, d))
        if m is None or m.is_zero():
            return 0
        return rank_q(m.transpose())


@dataclass
class HomologyTable:
    entries: dict  # (n, d) -> dim H_n at internal degree d
    chain_dims: dict
    rank_out: dict
    rank_in: dict
    max_n: int
    degrees: list
    partial: bool = False  # chains above max_n exist but are not reported

    def row(self, n: int) -> list:
        return [self.entries.get((n, d), 0) for d in self.degrees]

    def top_nonzero(self):
        ns = [n for (n, d), v in self.entries.items() if v]
        return max(ns) if ns else None

    def euler_ok(self):
        """Alternating sums of chain and homology dims agree; None on a truncated table."""
        if self.partial:
            return None
        for d in self.degrees:
            chi_c = sum((-1) ** n * self.chain_dims.get((n, d), 0) for n in range(self.max_n + 1))
            chi_h = sum((-1) ** n * self.entries.get((n, d), 0) for n in range(self.max_n + 1))
            if chi_c != chi_h:
                return False
        return True

    def records(self) -> list[dict]:
        out = []
        for (n, d) in sorted(self.entries, key=_sort_key):
            out.append({"n": n, "d": _deg_str(d), "chainDim": self.chain_dims.get((n, d), 0),
                        "rankOut": self.rank_out.get((n, d), 0),
                        "rankIn": self.rank_in.get((n, d), 0),
                        "homDim": self.entries[n, d]})
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "d", "chainDim", "rankOut", "rankIn", "homDim"])
        for r in self.records():
            w.writerow([r["n"], r["d"], r["chainDim"], r["rankOut"], r["rankIn"], r["homDim"]])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"maxN": self.max_n, "partial": self.partial, "rows": self.records()},
                          indent=2, sort_keys=True)


def _sort_key(nd):
    n, d = nd
    return (n, d if isinstance(d, tuple) else (d,))


def _deg_str(d):
    return ",".join(str(x) for x in d) if isinstance(d, tuple) else d


def homology_dims(c: GradedComplex) -> HomologyTable:
    """dim ker d_n - rank d_{n+1} at every (n, d) with nonzero chains."""
    ranks = {}
    for (n, d) in c.diffs:
        ranks[n, d] = c.rank(n, d)
    entries, rout, rin = {}, {}, {}
    top = c.n_max if c.complete_top else c.n_max - 1
    for (n, d), dim in c.dims.items():
        if n > top or dim == 0:
            continue
        ro = ranks.get((n, d), 0)
        ri = ranks.get((n + 1, d), 0)
        rout[n, d], rin[n, d] = ro, ri
        entries[n, d] = dim - ro - ri
    return HomologyTable(entries, {k: v for k, v in c.dims.items() if k[0] <= top and v},
                         rout, rin, top, list(c.degrees))


def build_koszul_complex(M: TwistedBimodule, syz: list[SyzygySpace], d_max: int,
                         chain_limit: int | None = None, d_min: int = 0) -> GradedComplex:
    alg = M.algebra
    if not alg.graded:
        raise ValueError("Koszul complex needs a graded algebra")
    q0 = as_fraction(alg.q)
    sc = M.scalars()
    sysm = alg.system
    n_max = len(syz) - 1
    left, right = _splits(syz)
    c = GradedComplex(q0=q0, n_max=n_max, degrees=list(range(d_min, d_max + 1)))
    bases = {}
    for n in range(n_max + 1):
        for d in range(d_min, d_max + 1):
            e = d - n
            words = sysm.normal_words(e) if e >= 0 else []
            dim = len(words) * syz[n].dim
            if chain_limit is not None and dim > chain_limit:
                raise ChainDimTooLarge(f"chain space ({n}, {d}) has dim {dim} > {chain_limit}")
            bases[n, d] = words
            c.dims[n, d] = dim
    for n in range(1, n_max + 1):
        sign = -1 if n % 2 else 1
        kdim_lo = syz[n - 1].dim
        for d in range(d_min, d_max + 1):
            src, tgt = bases[n, d], bases[n - 1, d]
            if not src or syz[n].dim == 0:
                c.diffs[n, d] = SparseMatrix(c.dims[n - 1, d], c.dims[n, d])
                continue
            tindex = {w: k for k, w in enumerate(tgt)}
            ent: dict = {}
            for mi, m in enumerate(src):
                for b in range(syz[n].dim):
                    col = mi * syz[n].dim + b
                    for v, co in left[n][b].items():
                        s = sc[v]
                        for u, cu in sysm.reduce_word(m + (v,)).items():
                            base = tindex[u] * kdim_lo
                            f = s * cu
                            for a, ca in co.items():
                                key = (base + a, col)
                                ent[key] = ent.get(key, 0) + f * ca
                    for v, co in right[n][b].items():
                        for u, cu in sysm.reduce_word((v,) + m).items():
                            base = tindex[u] * kdim_lo
                            f = sign * cu
                            for a, ca in co.items():
                                key = (base + a, col)
                                ent[key] = ent.get(key, 0) + f * ca
            c.diffs[n, d] = SparseMatrix(c.dims[n - 1, d], c.dims[n, d], ent)
    bad = c.check_d_squared()
    if bad:
        raise ComplexError(f"d^2 != 0 at {bad[:5]}")
    return c


# -- the Laurent polynomial ring -------------------------------------------------

def laurent_complex(d_min: int = -3, d_max: int = 3, twist_scalar=1, q0=Fraction(2)) -> GradedComplex:
    """Koszul complex of D = k[t, t^-1] with coefficients D twisted by t -> s t.

    Chains: t^(d-1) (x) e_t at (1, d) and t^d at (0, d); d(x (x) e_t) = x sigma(t) - t x.
    """
    D = build_laurent_algebra(q=as_fraction(q0))
    ti, t = D.gens.index("tinv"), D.gens.index("t")

    def power(k):
        return (t,) * k if k >= 0 else (ti,) * (-k)

    c = GradedComplex(q0=as_fraction(q0), n_max=1, degrees=list(range(d_min, d_max + 1)))
    for d in range(d_min, d_max + 1):
        c.dims[0, d] = 1
        c.dims[1, d] = 1
        x = power(d - 1)
        target = power(d)
        ent = {}
        for u, cu in D.system.reduce_word(x + (t,)).items():
            if u != target:
                raise ComplexError("unexpected normal form in D")
            ent[0, 0] = ent.get((0, 0), 0) + twist_scalar * cu
        for u, cu in D.system.reduce_word((t,) + x).items():
            ent[0, 0] = ent.get((0, 0), 0) - cu
        c.diffs[1, d] = SparseMatrix(1, 1, ent)
    return c


def tensor_complexes(c1: GradedComplex, c2: GradedComplex) -> GradedComplex:
    """Total complex of c1 (x) c2, graded by (n, (d1, d2)); d = d1 (x) 1 + (-1)^i 1 (x) d2."""
    if c1.q0 != c2.q0:
        raise FieldMismatch(f"complexes over q0={c1.q0} and q0={c2.q0}")
    n_max = c1.n_max + c2.n_max
    degs = [(a, b) for a in c1.degrees for b in c2.degrees]
    out = GradedComplex(q0=c1.q0, n_max=n_max, degrees=degs,
                        complete_top=c1.complete_top and c2.complete_top)
    # offsets of each (i, j) block inside total degree n
    offsets = {}
    for (a, b) in degs:
        for n in range(n_max + 1):
            off = 0
            for i in range(max(0, n - c2.n_max), min(n, c1.n_max) + 1):
                j = n - i
                offsets[n, (a, b), i] = off
                off += c1.dims.get((i, a), 0) * c2.dims.get((j, b), 0)
            out.dims[n, (a, b)] = off
    for (a, b) in degs:
        for n in range(1, n_max + 1):
            ent: dict = {}
            for i in range(max(0, n - c2.n_max), min(n, c1.n_max) + 1):
                j = n - i
                d1i, d2j = c1.dims.get((i, a), 0), c2.dims.get((j, b), 0)
                if not d1i or not d2j:
                    continue
                src = offsets[n, (a, b), i]
                if i >= 1:
                    m1 = c1.diffs.get((i, a))
                    tgt = offsets.get((n - 1, (a, b), i - 1))
                    if m1 is not None and tgt is not None:
                        for (r, col), v in m1.entries.items():
                            for y in range(d2j):
                                key = (tgt + r * d2j + y, src + col * d2j + y)
                                ent[key] = ent.get(key, 0) + v
                if j >= 1:
                    m2 = c2.diffs.get((j, b))
                    tgt = offsets.get((n - 1, (a, b), i))
                    d2lo = c2.dims.get((j - 1, b), 0)
                    if m2 is not None and tgt is not None:
                        sgn = -1 if i % 2 else 1
                        for x in range(d1i):
                            for (r, col), v in m2.entries.items():
                                key = (tgt + x * d2lo + r, src + x * d2j + col)
                                ent[key] = ent.get(key, 0) + sgn * v
            out.diffs[n, (a, b)] = SparseMatrix(out.dims[n - 1, (a, b)], out.dims[n, (a, b)], ent)
    bad = out.check_d_squared()
    if bad:
        raise ComplexError(f"d^2 != 0 in tensor complex at {bad[:5]}")
    return out


def kunneth_mismatches(c1: GradedComplex, c2: GradedComplex,
                       h1: HomologyTable | None = None, h2: HomologyTable | None = None,
                       h12: HomologyTable | None = None) -> list:
    """Bidegrees where dim H_n(c1 (x) c2) differs from sum_{i+j=n} dim H_i(c1) dim H_j(c2)."""
    h1 = h1 or homology_dims(c1)
    h2 = h2 or homology_dims(c2)
    h12 = h12 or homology_dims(tensor_complexes(c1, c2))
    bad = []
    for (n, (a, b)), v in sorted(h12.entries.items(), key=_sort_key):
        conv = sum(h1.entries.get((i, a), 0) * h2.entries.get((n - i, b), 0)
                   for i in range(n + 1))
        if v != conv:
            bad.append(((n, (a, b)), v, conv))
    return bad


# -- pipelines ----------------------------------------------------------------------

def koszul_table(N: int, twist: str = "sigma", d_max: int = 8, q0=Fraction(2),
                 n_max: int | None = None, chain_limit: int | None = None):
    """Homology of B with coefficients B_sigma (or B) as (table, complex, syzygies)."""
    q0 = check_q0(q0)
    B = build_matrix_algebra(N, q=q0)
    full = N * N
    n_report = full if n_max is None else min(n_max, full)
    # chains at (n, d) vanish for n > d, so syzygies above d_max are never needed;
    # one level above n_report is built so that rankIn at n_report is exact
    n_build = min(n_report + 1, full, max(d_max, 0))
    syz = koszul_syzygies(matrix_quadratic_data(B), n_build)
    tw = modular_sigma(B) if twist == "sigma" else None
    c = build_koszul_complex(TwistedBimodule(B, tw), syz, d_max, chain_limit)
    table = homology_dims(c)
    if n_report < min(full, d_max):
        table = _restrict(table, n_report)
    return table, c, syz


def _restrict(t: HomologyTable, n_top: int) -> HomologyTable:
    keep = lambda dct: {k: v for k, v in dct.items() if k[0] <= n_top}  # noqa: E731
    return HomologyTable(keep(t.entries), keep(t.chain_dims), keep(t.rank_out),
                         keep(t.rank_in), n_top, t.degrees, partial=True)


def expected_syzygy_dims(N: int, n_max: int) -> list[int]:
    return [comb(N * N, n) for n in range(n_max + 1)]


@dataclass
class DualityRow:
    d: int
    homology: int
    center: int

    @property
    def ok(self) -> bool:
        return self.homology == self.center


def duality_check_B(N: int = 2, d_max: int = 8, q0=Fraction(2), table: HomologyTable | None = None):
    """Compare dim H_{N^2}(B, B_sigma) at internal degree d with dim Z(B) in degree d - N^2."""
    top = N * N
    if table is None:
        table, _, _ = koszul_table(N, "sigma", d_max, q0)
    B = build_matrix_algebra(N, q=as_fraction(q0))
    zdims = center_degree_dims(B, d_max - top)
    rows = []
    for d in range(top, d_max + 1):
        rows.append(DualityRow(d, table.entries.get((top, d), 0), zdims[d - top]))
    return rows


def identity_bimodule(alg: PresentedAlgebra) -> TwistedBimodule:
    return TwistedBimodule(alg, identity_map(alg))
