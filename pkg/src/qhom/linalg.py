"""Exact sparse linear algebra over Q and Q[q, q^-1].

Ranks over Q run on integer rows kept primitive (content divided out after
each update), which avoids a gcd per Fraction operation.  Pivots follow a
Markowitz-style rule: shortest active row, then its sparsest column.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, lcm

from .scalars import LaurentQ, ScalarField, specialize


class GenericRankUncertain(ArithmeticError):
    """Ranks at the two specialization points disagree."""


class SparseMatrix:
    """Entries keyed by ``(row, col)``; zeros are never stored."""

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows: int, ncols: int, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        self.entries = {}
        if entries:
            for (i, j), v in dict(entries).items():
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise IndexError(f"entry ({i}, {j}) outside {nrows}x{ncols}")
                if v:
                    self.entries[i, j] = v

    @classmethod
    def from_dense(cls, rows) -> SparseMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols,
                   {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v})

    @classmethod
    def from_row_dicts(cls, rows, ncols: int) -> SparseMatrix:
        return cls(len(rows), ncols,
                   {(i, j): v for i, r in enumerate(rows) for j, v in r.items() if v})

    @property
    def shape(self):
        return self.nrows, self.ncols

    def triplets(self):
        """Sorted row-major ``(i, j, v)`` list."""
        return [(i, j, self.entries[i, j]) for i, j in sorted(self.entries)]

    def row_dicts(self) -> list[dict]:
        rows = [dict() for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            rows[i][j] = v
        return rows

    def to_dense(self):
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> SparseMatrix:
        return SparseMatrix(self.ncols, self.nrows,
                            {(j, i): v for (i, j), v in self.entries.items()})

    def map(self, f) -> SparseMatrix:
        return SparseMatrix(self.nrows, self.ncols,
                            {k: f(v) for k, v in self.entries.items()})

    def specialize(self, q0) -> SparseMatrix:
        return self.map(lambda v: specialize(v, q0))

    def __matmul__(self, other: SparseMatrix) -> SparseMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other.row_dicts()
        out = {}
        for (i, k), a in self.entries.items():
            for j, b in orows[k].items():
                out[i, j] = out.get((i, j), 0) + a * b
        return SparseMatrix(self.nrows, other.ncols, out)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={len(self.entries)})"


def _as_rows(m) -> list[dict]:
    if isinstance(m, SparseMatrix):
        return m.row_dicts()
    if m and isinstance(m[0], dict):
        return [dict(r) for r in m]
    return [{j: v for j, v in enumerate(r) if v} for r in m]


def _integer_row(row: dict) -> dict:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    out = {j: int(v * den) for j, v in row.items()}
    return _primitive(out)


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


def rank_q(m) -> int:
    """Exact rank of a matrix with rational entries."""
    rows = [_integer_row(r) for r in _as_rows(m) if r]
    rows = [r for r in rows if r]
    if not rows:
        return 0
    cols: dict[int, set] = {}
    for i, r in enumerate(rows):
        for j in r:
            cols.setdefault(j, set()).add(i)
    alive = set(range(len(rows)))
    heap = [(len(r), i) for i, r in enumerate(rows)]
    heapq.heapify(heap)
    rank = 0
    while heap:
        ln, i = heapq.heappop(heap)
        if i not in alive or ln != len(rows[i]):
            continue
        r = rows[i]
        alive.discard(i)
        if not r:
            continue
        c = min(r, key=lambda j: (len(cols[j]), j))
        p = r[c]
        for j in r:
            cols[j].discard(i)
        rank += 1
        for k in sorted(cols[c]):
            rk = rows[k]
            a = rk[c]
            g = gcd(p, a)
            fp, fa = p // g, a // g
            new = {j: fp * v for j, v in rk.items()}
            for j, v in r.items():
                s = new.get(j, 0) - fa * v
                if s:
                    new[j] = s
                else:
                    del new[j]
            new = _primitive(new)
            for j in rk:
                if j not in new:
                    cols[j].discard(k)
            for j in new:
                if j not in rk:
                    cols[j].add(k)
            rows[k] = new
            if new:
                heapq.heappush(heap, (len(new), k))
            else:
                alive.discard(k)
    return rank


def rref(m, ncols: int | None = None):
    """Reduced row echelon form over Q.

    Returns ``(rows, pivots)``: nonzero rows as ``{col: Fraction}`` with a 1 in
    column ``pivots[k]`` of row ``k`` and zeros in every other pivot column.
    """
    work = [{j: Fraction(v) for j, v in r.items()} for r in _as_rows(m) if r]
    pivots: list[int] = []
    done: list[dict] = []
    for r in work:
        # reduce against existing pivots
        for pc, pr in zip(pivots, done):
            a = r.get(pc)
            if a:
                for j, v in pr.items():
                    s = r.get(j, 0) - a * v
                    if s:
                        r[j] = s
                    else:
                        r.pop(j, None)
        if not r:
            continue
        c = min(r)
        inv = 1 / r[c]
        r = {j: v * inv for j, v in r.items()}
        for k, pr in enumerate(done):
            a = pr.get(c)
            if a:
                for j, v in r.items():
                    s = pr.get(j, 0) - a * v
                    if s:
                        pr[j] = s
                    else:
                        pr.pop(j, None)
        pivots.append(c)
        done.append(r)
    order = sorted(range(len(pivots)), key=pivots.__getitem__)
    return [done[k] for k in order], [pivots[k] for k in order]


def nullspace(m, ncols: int) -> list[dict]:
    """Basis of ``{x : M x = 0}`` as sparse column vectors ``{col: Fraction}``."""
    rows, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = {f: Fraction(1)}
        for pc, r in zip(pivots, rows):
            a = r.get(f)
            if a:
                v[pc] = -a
        basis.append(v)
    return basis


def in_span(vec: dict, rows: list[dict], pivots: list[int]):
    """Coordinates of ``vec`` in an RREF basis, or None if outside the span."""
    coords = {}
    residual = dict(vec)
    for pc, r in zip(pivots, rows):
        a = residual.get(pc)
        if a:
            coords[pc] = a
            for j, v in r.items():
                s = residual.get(j, 0) - a * v
                if s:
                    residual[j] = s
                else:
                    residual.pop(j, None)
    if residual:
        return None
    return coords


def rank_bareiss(m) -> int:
    """Fraction-free rank over Q[q, q^-1] (exact division by the previous pivot)."""
    a = [[LaurentQ._coerce(v) if not isinstance(v, LaurentQ) else v for v in row]
         for row in (m.to_dense() if isinstance(m, SparseMatrix) else m)]
    if not a:
        return 0
    nr, nc = len(a), len(a[0])
    prev = LaurentQ.const(1)
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                a[i][j] = (p * a[i][j] - a[i][c] * a[r][j]) / prev
            a[i][c] = LaurentQ()
        prev = p
        r += 1
        if r == nr:
            break
    return r


def matrix_rank(m, field: ScalarField | None = None) -> int:
    """Rank of a matrix whose entries may involve q.

    In specialized mode the rank is taken at ``field.q0`` and at
    ``field.q_check``; disagreement raises :class:`GenericRankUncertain`.
    """
    field = field or ScalarField()
    if not isinstance(m, SparseMatrix):
        m = SparseMatrix.from_dense(m) if m and not isinstance(m[0], dict) else \
            SparseMatrix.from_row_dicts(m, 1 + max((max(r) for r in m if r), default=-1))
    if field.mode == "symbolic":
        return rank_bareiss(m)
    ranks = [rank_q(m.specialize(q0)) for q0 in field.points]
    if len(set(ranks)) != 1:
        raise GenericRankUncertain(
            f"rank {ranks[0]} at q={field.points[0]} but {ranks[1]} at q={field.points[1]}")
    return ranks[0]
