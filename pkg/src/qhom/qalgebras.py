"""The quantum matrix algebra and its relatives, as certified rewriting systems.

``B = k_q[M(N)]``, ``A = k_q[SL(N)] = B/(det_q - 1)``, ``C = k_q[GL(N)]``
(``B`` with ``det_q`` inverted) and ``D = k[t, t^-1]``.  Every constructor
takes the value of ``q``: the symbolic :data:`~qhom.scalars.Q` or an exact
rational specialization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .freealg import GeneratorSet, NCPoly
from .linalg import nullspace, rank_q, rref
from .rewrite import ConfluenceReport, RewriteSystem, check_confluence, orient
from .scalars import Q

MAX_CERTIFIED_N = 3


class ConfluenceFailure(RuntimeError):
    def __init__(self, message, report: ConfluenceReport | None = None):
        super().__init__(message)
        self.report = report


class NotAHomomorphism(RuntimeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass
class PresentedAlgebra:
    kind: str  # "B", "A", "C", "D", "AD" or "external"
    N: int
    system: RewriteSystem
    relations: list  # defining relations as NCPolys, for homomorphism checks
    graded: bool
    q: object
    report: ConfluenceReport | None = None
    weights: dict | None = None  # generator name -> Z-degree, when not the length grading

    @property
    def gens(self) -> GeneratorSet:
        return self.system.gens

    @property
    def certified(self) -> bool:
        return self.system.certified

    def gen(self, name: str) -> NCPoly:
        return NCPoly.gen(self.gens, name)

    def nf(self, p: NCPoly) -> NCPoly:
        return NCPoly._raw(self.gens, self.system.reduce_terms(p.terms))

    def mul(self, a: NCPoly, b: NCPoly) -> NCPoly:
        return NCPoly._raw(self.gens, self.system.multiply(a.terms, b.terms))

    def descriptor(self) -> dict:
        rep = self.report
        return {
            "kind": self.kind,
            "N": self.N,
            "generators": list(self.gens.names),
            "ruleCount": len(self.system.rules),
            "graded": self.graded,
            "confluence": None if rep is None else {
                "overlapCount": rep.overlap_count,
                "allResolved": rep.all_resolved,
            },
        }


@dataclass
class AlgebraMap:
    source: PresentedAlgebra
    target: PresentedAlgebra
    images: dict  # source generator name -> NCPoly over target generators
    _cache: dict = field(default_factory=dict, repr=False)

    def image_of_word(self, w) -> dict:
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        if not w:
            out = {(): 1}
        else:
            head = self.image_of_word(w[:-1])
            last = self.images[self.source.gens.names[w[-1]]].terms
            out = self.target.system.multiply(head, last)
        self._cache[w] = out
        return out

    def __call__(self, p: NCPoly) -> NCPoly:
        if p.gens != self.source.gens:
            raise ValueError("element not in the source algebra")
        out: dict = {}
        for w, c in p.terms.items():
            for u, d in self.image_of_word(w).items():
                s = out.get(u, 0) + c * d
                if s:
                    out[u] = s
                else:
                    out.pop(u, None)
        return NCPoly._raw(self.target.gens, out)

    def diagonal_scalars(self):
        """``{name: scalar}`` if every generator maps to a multiple of itself, else None."""
        out = {}
        for name, img in self.images.items():
            if self.source.gens != self.target.gens or len(img.terms) != 1:
                return None
            (w, c), = img.terms.items()
            if w != (self.source.gens.index(name),):
                return None
            out[name] = c
        return out


# -- generators and relations --------------------------------------------------

def u(i: int, j: int) -> str:
    return f"u{i}{j}"


def standard_order(N: int) -> list[str]:
    """u11 < u12 < ... < uNN."""
    return [u(i, j) for i in range(1, N + 1) for j in range(1, N + 1)]


def diagonal_leading_order(N: int) -> list[str]:
    """Generator order making the diagonal word the deg-lex leading word of det_q.

    The diagonal word must also be B-normal, i.e. u11 < u22 < ... < uNN.
    N = 2 gives u12 < u21 < u11 < u22.  For N = 3 the order also keeps every
    leading coefficient of the relations a unit (the (q - q^-1) term never leads)
    and B stays confluent under it.
    """
    if N == 1:
        return [u(1, 1)]
    if N == 2:
        return [u(1, 2), u(2, 1), u(1, 1), u(2, 2)]
    if N == 3:
        return ["u12", "u13", "u11", "u23", "u22", "u33", "u21", "u31", "u32"]
    raise ValueError(f"no diagonal-leading order implemented for N = {N}")


def matrix_relations(N: int, gens: GeneratorSet, q=Q) -> list[NCPoly]:
    """Defining relations of k_q[M(N)], each row/column relation listed once."""
    g = lambda i, j: NCPoly.gen(gens, u(i, j))  # noqa: E731
    rels = []
    rng = range(1, N + 1)
    for r in rng:
        for k in rng:
            for l in rng:
                if k < l:
                    rels.append(g(r, k) * g(r, l) - g(r, l) * g(r, k) * q)
    for c in rng:
        for i in rng:
            for j in rng:
                if i < j:
                    rels.append(g(i, c) * g(j, c) - g(j, c) * g(i, c) * q)
    qq = q - 1 / q
    for i in rng:
        for j in rng:
            if i >= j:
                continue
            for k in rng:
                for l in rng:
                    if k >= l:
                        continue
                    rels.append(g(i, l) * g(j, k) - g(j, k) * g(i, l))
                    rels.append(g(i, k) * g(j, l) - g(j, l) * g(i, k) - g(i, l) * g(j, k) * qq)
    return rels


def inversions(perm) -> int:
    return sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])


def quantum_determinant(N: int, gens: GeneratorSet | None = None, q=Q) -> NCPoly:
    """sum over permutations p of (-q)^inv(p) u_{1 p(1)} ... u_{N p(N)}."""
    gens = gens or GeneratorSet(standard_order(N))
    terms = {}
    for perm in permutations(range(1, N + 1)):
        w = tuple(gens.index(u(i + 1, perm[i])) for i in range(N))
        terms[w] = (-q) ** inversions(perm)
    return NCPoly(gens, terms)


def _certify(kind, N, system, allow_uncertified=False):
    report = check_confluence(system)
    if not report.all_resolved and not allow_uncertified:
        bad = report.unresolved()[0]
        raise ConfluenceFailure(
            f"{kind}(N={N}): {len(report.unresolved())} unresolved overlaps, e.g. at "
            f"{system.gens.word_str(bad.word)}", report)
    return report


def build_matrix_algebra(N: int, q=Q, order: str = "standard",
                         certify: bool | None = None) -> PresentedAlgebra:
    if N < 1:
        raise ValueError("N must be at least 1")
    names = standard_order(N) if order == "standard" else diagonal_leading_order(N)
    gens = GeneratorSet(names)
    rels = matrix_relations(N, gens, q)
    system = orient(rels, gens)
    if certify is None:
        certify = N <= MAX_CERTIFIED_N
    report = _certify("B", N, system) if certify else None
    return PresentedAlgebra("B", N, system, rels, True, q, report)


def build_special_algebra(N: int, q=Q, certify: bool | None = None,
                          allow_uncertified: bool = False) -> PresentedAlgebra:
    """B plus the rule (diagonal word) -> 1 - (other det_q terms).

    Certified for N <= 2.  For N = 3 the degree-3 leading word cannot catch
    words such as u11.u22.u22.u33, so the system is not confluent; pass
    ``allow_uncertified=True`` to get it anyway (reductions to 0 remain valid
    ideal-membership proofs).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    gens = GeneratorSet(diagonal_leading_order(N))
    rels = matrix_relations(N, gens, q)
    rels.append(quantum_determinant(N, gens, q) - 1)
    system = orient(rels, gens)
    if certify is None:
        certify = N <= MAX_CERTIFIED_N
    report = _certify("A", N, system, allow_uncertified) if certify else None
    return PresentedAlgebra("A", N, system, rels, False, q, report)


def build_general_algebra(N: int, q=Q, certify: bool | None = None,
                          allow_uncertified: bool = False) -> PresentedAlgebra:
    """k_q[GL(N)] on the u's plus central ``det`` and ``dinv`` with ``det*dinv = 1``.

    ``det`` is a name for det_q; the rule rewriting the diagonal word to
    ``det`` + lower terms keeps the system finite and confluent.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    gens = GeneratorSet(["dinv", "det"] + diagonal_leading_order(N))
    rels = matrix_relations(N, gens, q)
    det, dinv = NCPoly.gen(gens, "det"), NCPoly.gen(gens, "dinv")
    rels.append(quantum_determinant(N, gens, q) - det)
    rels.append(det * dinv - 1)
    rels.append(dinv * det - 1)
    for name in diagonal_leading_order(N):
        x = NCPoly.gen(gens, name)
        rels.append(x * det - det * x)
        rels.append(x * dinv - dinv * x)
    system = orient(rels, gens)
    if certify is None:
        certify = N <= MAX_CERTIFIED_N
    report = _certify("C", N, system, allow_uncertified) if certify else None
    weights = {n: 1 for n in gens.names}
    weights.update(det=N, dinv=-N)
    return PresentedAlgebra("C", N, system, rels, True, q, report, weights)


def build_laurent_algebra(q=Q) -> PresentedAlgebra:
    gens = GeneratorSet(["tinv", "t"])
    t, ti = NCPoly.gen(gens, "t"), NCPoly.gen(gens, "tinv")
    rels = [t * ti - 1, ti * t - 1]
    system = orient(rels, gens)
    report = _certify("D", 0, system)
    return PresentedAlgebra("D", 0, system, rels, True, q, report, {"t": 1, "tinv": -1})


def build_a_tensor_d(N: int, q=Q) -> PresentedAlgebra:
    """A (x) D with t, tinv central; generator names as in A plus ``t``, ``tinv``."""
    names = diagonal_leading_order(N)
    gens = GeneratorSet(["tinv", "t"] + names)
    rels = matrix_relations(N, gens, q)
    rels.append(quantum_determinant(N, gens, q) - 1)
    t, ti = NCPoly.gen(gens, "t"), NCPoly.gen(gens, "tinv")
    rels += [t * ti - 1, ti * t - 1]
    for name in names:
        x = NCPoly.gen(gens, name)
        rels.append(x * t - t * x)
        rels.append(x * ti - ti * x)
    system = orient(rels, gens)
    report = _certify("AD", N, system)
    return PresentedAlgebra("AD", N, system, rels, False, q, report)


# -- maps -------------------------------------------------------------------------

def is_homomorphism(f: AlgebraMap) -> bool:
    return homomorphism_witness(f) is None


def homomorphism_witness(f: AlgebraMap):
    """First source relation whose image is nonzero, with that image; None if all vanish."""
    for r in f.source.relations:
        img = f(r)
        if img:
            return r, img
    return None


def sigma_exponent(N: int, i: int, j: int) -> int:
    return 2 * (N + 1 - i - j)


def modular_sigma(alg: PresentedAlgebra, inverse: bool = False) -> AlgebraMap:
    """u_ij -> q^(2(N+1-i-j)) u_ij, identity on det, dinv; checked to be a homomorphism."""
    if alg.kind not in ("B", "A", "C"):
        raise ValueError(f"sigma is defined on B, A, C, not {alg.kind}")
    N, q = alg.N, alg.q
    images = {}
    for name in alg.gens.names:
        if name in ("det", "dinv"):
            images[name] = alg.gen(name)
            continue
        i, j = int(name[1]), int(name[2])
        e = sigma_exponent(N, i, j)
        images[name] = alg.gen(name).scale(q ** (-e if inverse else e))
    f = AlgebraMap(alg, alg, images)
    bad = homomorphism_witness(f)
    if bad is not None:
        raise NotAHomomorphism(f"sigma does not preserve {bad[0]}", bad)
    return f


def identity_map(alg: PresentedAlgebra) -> AlgebraMap:
    return AlgebraMap(alg, alg, {n: alg.gen(n) for n in alg.gens.names})


def compose(f: AlgebraMap, g: AlgebraMap) -> AlgebraMap:
    """``f after g``."""
    return AlgebraMap(g.source, f.target, {n: f(img) for n, img in g.images.items()})


def is_central(x: NCPoly, alg: PresentedAlgebra) -> bool:
    return all(not commutator(x, alg.gen(g), alg) for g in alg.gens.names)


def commutator(x: NCPoly, y: NCPoly, alg: PresentedAlgebra) -> NCPoly:
    return alg.mul(x, y) - alg.mul(y, x)


def determinant_in(alg: PresentedAlgebra) -> NCPoly:
    return alg.nf(quantum_determinant(alg.N, alg.gens, alg.q))


# -- C = A (x) D -------------------------------------------------------------------

def gl_factorization_iso(N: int = 2, q=Q, C: PresentedAlgebra | None = None,
                         AD: PresentedAlgebra | None = None) -> AlgebraMap:
    """C -> A (x) D: first-row u's pick up a factor t, det -> t, dinv -> tinv."""
    C = C or build_general_algebra(N, q)
    AD = AD or build_a_tensor_d(N, q)
    t = NCPoly.gen(AD.gens, "t")
    images = {"det": t, "dinv": NCPoly.gen(AD.gens, "tinv")}
    for name in diagonal_leading_order(N):
        a = NCPoly.gen(AD.gens, name)
        images[name] = AD.mul(a, t) if name[1] == "1" else a
    f = AlgebraMap(C, AD, images)
    bad = homomorphism_witness(f)
    if bad is not None:
        raise NotAHomomorphism(f"C -> A(x)D does not preserve {bad[0]}", bad)
    return f


def t_weight(alg: PresentedAlgebra, w) -> int:
    """Grading preserved by the factorization map.

    On C: first-row letters and det count +1, dinv counts -1.  On A (x) D: the
    exponent of t.
    """
    names = alg.gens.names
    out = 0
    for i in w:
        n = names[i]
        if n in ("det", "t"):
            out += 1
        elif n in ("dinv", "tinv"):
            out -= 1
        elif alg.kind == "C" and n[1] == "1":
            out += 1
    return out


def _u_length(alg, w) -> int:
    return sum(1 for i in w if alg.gens.names[i].startswith("u"))


def _box_words(alg: PresentedAlgebra, max_len: int, weight: int, extra: int):
    """Normal words with at most ``max_len`` u-letters and given t-weight.

    Words are u-part times a pure power of the central letters, so it is enough
    to enumerate normal words up to ``max_len + extra`` letters.
    """
    out = []
    for w in alg.system.normal_words_upto(max_len + extra):
        if _u_length(alg, w) <= max_len and t_weight(alg, w) == weight:
            out.append(w)
    return out


def check_factorization_bijection(f: AlgebraMap, max_len: int = 4, max_weight: int = 2):
    """Bounded-degree bijectivity of ``C -> A (x) D`` on normal-word bases.

    For each t-weight ``e`` with ``|e| <= max_weight`` and u-length at most
    ``max_len`` on both sides: image vectors are independent and span the
    target box.  Returns a list of per-weight dicts; raises on failure.
    """
    C, AD = f.source, f.target
    rows = []
    for e in range(-max_weight, max_weight + 1):
        extra = max_weight + max_len
        src = _box_words(C, max_len, e, extra)
        tgt = _box_words(AD, max_len, e, extra)
        index = {w: k for k, w in enumerate(tgt)}
        vecs = []
        for w in src:
            img = f.image_of_word(w)
            if any(u not in index for u in img):
                raise NotAHomomorphism(f"image of {C.gens.word_str(w)} leaves the box", w)
            vecs.append({index[u]: c for u, c in img.items()})
        r = rank_q([{k: Fraction(v) for k, v in vv.items()} for vv in vecs]) if vecs else 0
        ok = r == len(src) == len(tgt)
        rows.append({"weight": e, "sourceDim": len(src), "targetDim": len(tgt), "rank": r, "ok": ok})
        if not ok:
            raise NotAHomomorphism(f"no bijection at t-weight {e}: {rows[-1]}", rows[-1])
    return rows


# -- centers ----------------------------------------------------------------------

def _center_in_span(alg: PresentedAlgebra, basis) -> list[dict]:
    """Nullspace of x -> ([x, g])_g over the given normal words, in RREF order."""
    gens = [(k,) for k in range(len(alg.gens))]
    row_index = {}
    rows: list[dict] = []
    for g in gens:
        for col, w in enumerate(basis):
            left = alg.system.reduce_word(w + g)
            right = alg.system.reduce_word(g + w)
            diff = dict(left)
            for u_, c in right.items():
                s = diff.get(u_, 0) - c
                if s:
                    diff[u_] = s
                else:
                    diff.pop(u_, None)
            for u_, c in diff.items():
                key = (g, u_)
                if key not in row_index:
                    row_index[key] = len(rows)
                    rows.append({})
                rows[row_index[key]][col] = Fraction(c)
    null = nullspace(rows, len(basis))
    basis_rows, _ = rref(null)
    return basis_rows


def center_bounded(alg: PresentedAlgebra, D: int) -> list[NCPoly]:
    """Basis of central elements spanned by normal words of length <= D.

    ``alg`` must be built at a rational value of q.  Graded algebras are
    handled degree by degree; otherwise the whole length filtration is used.
    """
    if not isinstance(alg.q, Fraction):
        raise TypeError("center_bounded needs an algebra specialized at a rational q")
    out = []
    if alg.graded and alg.kind == "B":
        for d in range(D + 1):
            basis = alg.system.normal_words(d)
            for v in _center_in_span(alg, basis):
                out.append(NCPoly(alg.gens, {basis[k]: c for k, c in v.items()}))
        return out
    basis = alg.system.normal_words_upto(D)
    for v in _center_in_span(alg, basis):
        out.append(NCPoly(alg.gens, {basis[k]: c for k, c in v.items()}))
    return out


def center_degree_dims(alg: PresentedAlgebra, D: int) -> list[int]:
    """dim of the degree-d part of the center of a graded B, d = 0..D."""
    return [len(_center_in_span(alg, alg.system.normal_words(d))) for d in range(D + 1)]


def same_span(polys_a, polys_b) -> bool:
    """True iff two lists of NCPolys (rational coefficients) span the same subspace."""
    words = sorted({w for p in list(polys_a) + list(polys_b) for w in p.terms})
    idx = {w: k for k, w in enumerate(words)}
    va = [{idx[w]: Fraction(c) for w, c in p.terms.items()} for p in polys_a]
    vb = [{idx[w]: Fraction(c) for w, c in p.terms.items()} for p in polys_b]
    ra, rb, rab = rank_q(va), rank_q(vb), rank_q(va + vb)
    return ra == rb == rab
