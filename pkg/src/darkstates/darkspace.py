"""Dark, transparent and invisible subspaces of an atomic sector.

Kernels are computed exactly by fraction-free elimination; the returned basis
is the canonical one read off the reduced echelon form (one primitive integer
vector per free basis state).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod

import numpy as np

from . import exact
from .operators import apply, lowering_matrix, raising_matrix
from .sector import SectorBasis, rank_assignment, sector
from .states import StateVector, restrict_to_sector
from .validation import InvalidArgumentError, check_atoms, check_couplings, check_weight

__all__ = [
    "SubspaceBasis",
    "dark_dimension",
    "transparent_dimension",
    "dark_basis",
    "transparent_basis",
    "invisible_basis",
    "witness_vector",
    "witness_amplitude",
    "dual_witness_vector",
    "constraint_certificates",
    "constraint_rank",
    "is_dark",
    "is_transparent",
    "is_invisible",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SubspaceBasis:
    n: int
    k: int
    kind: str
    vectors: tuple
    couplings: tuple = None

    def __len__(self):
        return len(self.vectors)

    @property
    def dim(self):
        return len(self.vectors)

    @property
    def basis(self):
        return sector(self.n, self.k)

    def to_numpy(self):
        """Row-stacked float copy, shape ``(dim, C(n, k))``."""
        if not self.vectors:
            return np.zeros((0, len(self.basis)))
        return np.array([[float(a) for a in v.amps] for v in self.vectors])

    def rank(self):
        return exact.rank(exact.as_rows([v.amps for v in self.vectors]), len(self.basis))


def dark_dimension(n, k):
    """``max(C(n,k) - C(n,k-1), 0)`` with ``C(n,-1) = 0``."""
    if not 0 <= k <= n:
        raise InvalidArgumentError(f"need 0 <= k <= n, got k={k}, n={n}")
    below = comb(n, k - 1) if k >= 1 else 0
    return max(comb(n, k) - below, 0)


def transparent_dimension(n, k):
    if not 0 <= k <= n:
        raise InvalidArgumentError(f"need 0 <= k <= n, got k={k}, n={n}")
    above = comb(n, k + 1) if k < n else 0
    return max(comb(n, k) - above, 0)


def _kernel(ops, n, k, kind, couplings):
    basis = sector(n, k)
    rows = []
    for op in ops:
        rows.extend(op.to_rows())
    vecs = exact.nullspace(rows, len(basis))
    return SubspaceBasis(
        n, k, kind, tuple(StateVector(basis, tuple(v), True) for v in vecs), couplings
    )


def _prep(n, k, couplings):
    n = check_atoms(n)
    k = check_weight(n, k)
    return n, k, check_couplings(n, couplings)


def dark_basis(n, k, couplings=None):
    """Exact basis of the kernel of the collective lowering operator on B(n, k)."""
    n, k, g = _prep(n, k, couplings)
    return _kernel([lowering_matrix(n, k, g)], n, k, "dark", g)


def transparent_basis(n, k, couplings=None):
    """Exact basis of the kernel of the collective raising operator on B(n, k)."""
    n, k, g = _prep(n, k, couplings)
    return _kernel([raising_matrix(n, k, g)], n, k, "transparent", g)


def invisible_basis(n, k, couplings=None):
    """States annihilated by both ladder operators."""
    n, k, g = _prep(n, k, couplings)
    return _kernel([lowering_matrix(n, k, g), raising_matrix(n, k, g)], n, k, "invisible", g)


def witness_amplitude(n, k, p):
    """``(-1)^p p! / prod_{i=0..p} (n-k+1-i)``; ``p = 0`` gives ``1/(n-k+1)``."""
    den = prod(n - k + 1 - i for i in range(p + 1))
    if den == 0:
        raise ArithmeticError(f"rank {p} exceeds n-k={n - k}; no witness amplitude")
    return Fraction((-1) ** p * factorial(p), den)


def witness_vector(n, k, j0):
    """Amplitudes whose lowering image is the indicator of parent ``j0``.

    Every family of nonzero rank sums to zero, the rank-0 family of ``j0``
    sums to one, so the constraint attached to ``j0`` is independent of the
    others.
    """
    n = check_atoms(n)
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"witnesses need 1 <= k <= n, got k={k}")
    ra = rank_assignment(n, k, j0)
    basis = sector(n, k)
    cache = {}
    amps = []
    for c in basis.codes:
        p = ra.member_rank[c]
        if p not in cache:
            cache[p] = witness_amplitude(n, k, p)
        amps.append(cache[p])
    return StateVector(basis, tuple(amps), True)


def dual_witness_vector(n, k, j):
    """Row certificate ``u`` on B(n, k-1) with ``u^T L = e_j`` for ``j`` in B(n, k).

    Bit complement turns lowering on weight ``k`` into the transpose of
    lowering on weight ``n-k+1``, so ``u`` is the complemented ordinary
    witness there.  It exists when ``2k >= n+1``, exactly the range where
    ordinary witnesses stop existing.
    """
    n = check_atoms(n)
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"witnesses need 1 <= k <= n, got k={k}")
    full = (1 << n) - 1
    w = witness_vector(n, n - k + 1, full ^ int(j))
    target = sector(n, k - 1)
    amps = [Fraction(0)] * len(target)
    for c, a in zip(w.basis.codes, w.amps):
        amps[target.index_of[full ^ c]] = a
    return StateVector(target, tuple(amps), True)


def constraint_certificates(n, k):
    """Exact certificates that the darkness constraints on B(n, k) have full rank.

    Returns ``("column", {parent: v})`` with ``L v = e_parent`` when
    ``2k <= n+1``, otherwise ``("row", {j: u})`` with ``u^T L = e_j``.
    """
    if 2 * k <= n + 1:
        return "column", {j0: witness_vector(n, k, j0) for j0 in sector(n, k - 1).codes}
    return "row", {j: dual_witness_vector(n, k, j) for j in sector(n, k).codes}


def constraint_rank(n, k, couplings=None):
    """Exact rank of the darkness constraints on B(n, k)."""
    op = lowering_matrix(n, k, couplings)
    return exact.rank(op.to_rows(), len(op.domain))


def _residual(op_builder, v, couplings, tol):
    v = restrict_to_sector(v)
    if not isinstance(v.basis, SectorBasis):
        raise InvalidArgumentError("expected an atomic sector vector")
    n, k = v.basis.n, v.basis.k
    g = check_couplings(n, couplings)
    out = [apply(op, v) for op in op_builder(n, k, g)]
    if v.exact:
        return all(w.is_zero() for w in out)
    tol = DEFAULT_TOL if tol is None else tol
    return all(w.norm() <= tol for w in out)


def is_dark(v, couplings=None, tol=None):
    """Kernel membership for the collective lowering operator.

    ``v`` must live in one excitation sector (a full-space vector is accepted
    if its support has a single weight).  Exact vectors are tested exactly;
    float vectors against ``tol`` (default 1e-10).
    """
    return _residual(lambda n, k, g: [lowering_matrix(n, k, g)], v, couplings, tol)


def is_transparent(v, couplings=None, tol=None):
    return _residual(lambda n, k, g: [raising_matrix(n, k, g)], v, couplings, tol)


def is_invisible(v, couplings=None, tol=None):
    return _residual(
        lambda n, k, g: [lowering_matrix(n, k, g), raising_matrix(n, k, g)], v, couplings, tol
    )

