"""Exact linear algebra over the rationals.

Matrices are sparse: a list of rows, each row a ``{column: value}`` dict with
integer or :class:`fractions.Fraction` values.  Elimination is fraction free:
every row is scaled to a primitive integer vector and row operations are
``p * row - f * pivot_row`` followed by division by the row content, so no
intermediate rationals are ever formed.
"""

from fractions import Fraction
from functools import reduce
from math import gcd, lcm

__all__ = [
    "Echelon",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "primitive",
    "as_rows",
]


def _row_to_int(row):
    """Scale a rational row to a primitive integer row (same direction)."""
    items = [(c, Fraction(v)) for c, v in row.items() if v != 0]
    if not items:
        return {}
    den = reduce(lcm, (v.denominator for _, v in items), 1)
    out = {c: int(v * den) for c, v in items}
    return _normalize(out)


def _normalize(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for c in row:
            row[c] //= g
    return row


def _combine(row, prow, pcol):
    """Eliminate ``pcol`` from ``row`` using pivot row ``prow`` (integers)."""
    f = row[pcol]
    p = prow[pcol]
    g = gcd(f, p)
    a, b = p // g, f // g
    if a != 1:
        for c in row:
            row[c] *= a
    for c, v in prow.items():
        nv = row.get(c, 0) - b * v
        if nv:
            row[c] = nv
        else:
            row.pop(c, None)
    return _normalize(row)


def as_rows(matrix):
    """Convert a dense list-of-lists (or numpy array) to sparse rows."""
    return [{c: v for c, v in enumerate(r) if v != 0} for r in matrix]


class Echelon:
    """Reduced row echelon form of a rational matrix.

    ``rows[r]`` has a 1 at ``pivots[r]``; pivots increase strictly.  The
    reduced form is unique, so everything derived from it (kernel basis,
    canonical solutions) is deterministic regardless of pivot-row choice.
    """

    def __init__(self, rows, pivots, ncols):
        self.rows = rows
        self.pivots = pivots
        self.ncols = ncols

    @property
    def rank(self):
        return len(self.pivots)

    @property
    def free(self):
        pset = set(self.pivots)
        return [c for c in range(self.ncols) if c not in pset]


def rref(rows, ncols):
    """Fraction-free Gauss-Jordan elimination.

    Columns are processed left to right so pivots land on the earliest
    possible columns.  Among candidate rows the sparsest is used as pivot to
    limit fill-in.
    """
    work = [r for r in (_row_to_int(r) for r in rows) if r]
    for r in work:
        for c in r:
            if not 0 <= c < ncols:
                raise ValueError(f"column {c} outside 0..{ncols - 1}")
    # column -> set of row ids among the not-yet-pivoted rows
    active = dict(enumerate(work))
    by_col = {}
    for rid, r in active.items():
        for c in r:
            by_col.setdefault(c, set()).add(rid)

    done = []
    pivots = []
    for col in range(ncols):
        cands = by_col.get(col)
        if not cands:
            continue
        prid = min(cands, key=lambda rid: (len(active[rid]), rid))
        prow = active.pop(prid)
        for c in prow:
            by_col[c].discard(prid)
        for rid in list(by_col[col]):
            row = active[rid]
            before = set(row)
            _combine(row, prow, col)
            after = set(row)
            for c in before - after:
                by_col[c].discard(rid)
            for c in after - before:
                by_col.setdefault(c, set()).add(rid)
            if not row:
                del active[rid]
        done.append(prow)
        pivots.append(col)

    # back substitution: clear entries above each pivot
    col_rows = {}
    for idx, r in enumerate(done):
        for c in r:
            col_rows.setdefault(c, set()).add(idx)
    for idx in range(len(done) - 1, -1, -1):
        pcol = pivots[idx]
        prow = done[idx]
        for other in sorted(col_rows.get(pcol, ())):
            if other >= idx:
                continue
            row = done[other]
            before = set(row)
            _combine(row, prow, pcol)
            after = set(row)
            for c in before - after:
                col_rows[c].discard(other)
            for c in after - before:
                col_rows.setdefault(c, set()).add(other)

    out = []
    for pcol, r in zip(pivots, done):
        p = r[pcol]
        out.append({c: Fraction(v, p) for c, v in sorted(r.items())})
    return Echelon(out, pivots, ncols)


def rank(rows, ncols):
    return rref(rows, ncols).rank


def primitive(vec):
    """Scale a rational vector to a primitive integer vector.

    The overall sign is kept, so a positive leading free coordinate stays
    positive.  Returns a list of ``Fraction`` with integer values.
    """
    nz = [Fraction(v) for v in vec if v != 0]
    if not nz:
        return [Fraction(0)] * len(vec)
    den = reduce(lcm, (v.denominator for v in nz), 1)
    ints = [int(Fraction(v) * den) for v in vec]
    g = reduce(gcd, ints, 0)
    return [Fraction(v // g) for v in ints]


def nullspace(rows, ncols, echelon=None, scale=True):
    """Canonical basis of the right kernel.

    One vector per free column ``f`` of the reduced echelon form, with a 1 at
    ``f`` and zeros at the other free columns; with ``scale`` each vector is
    made a primitive integer vector (free coordinate positive).
    """
    ech = echelon if echelon is not None else rref(rows, ncols)
    basis = []
    for f in ech.free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for pcol, r in zip(ech.pivots, ech.rows):
            v = r.get(f)
            if v:
                vec[pcol] = -v
        basis.append(primitive(vec) if scale else vec)
    return basis


def solve(rows, ncols, rhs):
    """Solve ``A x = b`` exactly.

    ``rhs`` is a list of right-hand sides.  Returns one list per right-hand
    side holding the pivot-ordered canonical solution (free variables zero),
    or ``None`` where the system is inconsistent.
    """
    m = len(rows)
    nb = len(rhs)
    for b in rhs:
        if len(b) != m:
            raise ValueError("right-hand side length does not match rows")
    aug = []
    for r_idx, row in enumerate(rows):
        new = dict(row)
        for b_idx, b in enumerate(rhs):
            if b[r_idx] != 0:
                new[ncols + b_idx] = b[r_idx]
        aug.append(new)
    ech = rref(aug, ncols + nb)
    if nb > 1 and any(p >= ncols for p in ech.pivots):
        # an inconsistent column would pollute the others; redo one by one
        return [solve(rows, ncols, [b])[0] for b in rhs]
    results = [[Fraction(0)] * ncols for _ in range(nb)]
    bad = set()
    for pcol, r in zip(ech.pivots, ech.rows):
        if pcol >= ncols:
            bad.add(pcol - ncols)
            continue
        for b_idx in range(nb):
            v = r.get(ncols + b_idx)
            if v:
                results[b_idx][pcol] = v
    return [None if i in bad else x for i, x in enumerate(results)]
