"""Products of two-atom singlets and the decomposition of dark states over them.

A pair ``(i, j)`` with ``i < j`` contributes ``|0>_i|1>_j - |1>_i|0>_j``;
atoms outside every pair stay in the ground state.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import exact
from .operators import SparseOperator, apply, lowering_matrix
from .sector import atom_mask, sector
from .states import StateVector, restrict_to_sector
from .validation import InvalidArgumentError, check_atoms

__all__ = [
    "Matching",
    "SingletDecomposition",
    "NotDarkError",
    "RESTRICTIONS",
    "enumerate_matchings",
    "expand_matching",
    "swap_atoms",
    "antisymmetrize",
    "singlet_project",
    "antisymmetrizer_matrix",
    "projector_matrix",
    "singlet_decompose",
    "decompose_many",
    "pair_span_residual",
    "pair_span_residual_sq",
]

RESTRICTIONS = ("all", "non_crossing_uncovered")


@dataclass(frozen=True, order=True)
class Matching:
    n: int
    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted(tuple(p) for p in self.pairs))
        seen = set()
        for i, j in pairs:
            if not 1 <= i < j <= self.n:
                raise InvalidArgumentError(f"bad pair ({i},{j}) for n={self.n}")
            if i in seen or j in seen:
                raise InvalidArgumentError(f"atom reused in pairs {pairs}")
            seen.update((i, j))
        object.__setattr__(self, "pairs", pairs)

    @property
    def k(self):
        return len(self.pairs)

    @property
    def singles(self):
        used = {a for p in self.pairs for a in p}
        return tuple(a for a in range(1, self.n + 1) if a not in used)

    def is_non_crossing_uncovered(self):
        for (a, b), (c, d) in combinations(self.pairs, 2):
            if a < c < b < d or c < a < d < b:
                return False
        return not any(i < s < j for s in self.singles for i, j in self.pairs)

    def to_json(self):
        return {"n": self.n, "pairs": [list(p) for p in self.pairs]}

    @classmethod
    def from_json(cls, obj):
        return cls(int(obj["n"]), tuple(tuple(p) for p in obj["pairs"]))

    def __str__(self):
        return "".join(f"({i}{j})" if self.n < 10 else f"({i},{j})" for i, j in self.pairs)


def _perfect(atoms):
    if not atoms:
        yield ()
        return
    first, rest = atoms[0], atoms[1:]
    for idx, partner in enumerate(rest):
        for tail in _perfect(rest[:idx] + rest[idx + 1:]):
            yield ((first, partner),) + tail


def _non_crossing(n, k):
    out = []

    def walk(pos, stack, pairs, opens_left):
        if pos > n:
            if not stack and opens_left == 0:
                out.append(tuple(pairs))
            return
        remaining = n - pos + 1
        # single: only at depth zero
        if not stack and remaining > 2 * opens_left:
            walk(pos + 1, stack, pairs, opens_left)
        if stack:
            top = stack.pop()
            pairs.append((top, pos))
            walk(pos + 1, stack, pairs, opens_left)
            pairs.pop()
            stack.append(top)
        if opens_left and remaining >= len(stack) + 2:
            stack.append(pos)
            walk(pos + 1, stack, pairs, opens_left - 1)
            stack.pop()

    walk(1, [], [], k)
    return out


def enumerate_matchings(n, k, restrict="all"):
    """All ``k``-pair matchings of ``n`` atoms, sorted by their pair lists.

    ``restrict="non_crossing_uncovered"`` keeps matchings with no crossing
    arcs and no unpaired atom lying under an arc.
    """
    n = check_atoms(n)
    if restrict not in RESTRICTIONS:
        raise InvalidArgumentError(f"restrict must be one of {RESTRICTIONS}")
    if k < 0:
        raise InvalidArgumentError(f"pair count must be >= 0, got {k}")
    if 2 * k > n:
        return []
    if restrict == "all":
        found = [
            p for chosen in combinations(range(1, n + 1), 2 * k) for p in _perfect(chosen)
        ]
    else:
        found = _non_crossing(n, k)
    return sorted(Matching(n, p) for p in found)


def expand_matching(m):
    """Expand the singlet product of ``m`` in the sector basis B(n, k)."""
    n = m.n
    terms = {0: 1}
    for i, j in m.pairs:
        mi, mj = atom_mask(n, i), atom_mask(n, j)
        new = {}
        for code, c in terms.items():
            new[code | mj] = c
            new[code | mi] = -c
        terms = new
    basis = sector(n, m.k)
    amps = [Fraction(0)] * len(basis)
    for code, c in terms.items():
        amps[basis.index_of[code]] = Fraction(c)
    return StateVector(basis, tuple(amps), True)


def _check_pair(n, i, j):
    if i == j:
        raise InvalidArgumentError("antisymmetrization needs two distinct atoms")
    if not (1 <= i <= n and 1 <= j <= n):
        raise InvalidArgumentError(f"atoms ({i},{j}) outside 1..{n}")


def _swap_code(code, mi, mj):
    if bool(code & mi) != bool(code & mj):
        return code ^ mi ^ mj
    return code


def swap_atoms(v, i, j):
    """Exchange atoms ``i`` and ``j`` (1-based) in every basis state."""
    v = restrict_to_sector(v)
    basis = v.basis
    mi, mj = atom_mask(basis.n, i), atom_mask(basis.n, j)
    perm = [basis.index_of[_swap_code(c, mi, mj)] for c in basis.codes]
    if v.exact:
        amps = [Fraction(0)] * len(basis)
        for src, dst in enumerate(perm):
            amps[dst] = v.amps[src]
        return StateVector(basis, tuple(amps), True)
    arr = v.to_numpy()
    out = arr.copy()
    out[perm] = arr
    return StateVector(basis, out, False)


def antisymmetrize(v, i, j):
    """``v - (i j) v``."""
    v = restrict_to_sector(v)
    _check_pair(v.basis.n, i, j)
    return v - swap_atoms(v, i, j)


def _pair_blocks(n, k, i, j):
    """Index pairs ``(a, b)``: ``a`` has atom i=0, j=1 and ``b`` the swap."""
    basis = sector(n, k)
    lo, hi = min(i, j), max(i, j)
    mi, mj = atom_mask(n, lo), atom_mask(n, hi)
    out = []
    for c in basis.codes:
        if c & mj and not c & mi:
            out.append((basis.index_of[c], basis.index_of[c ^ mi ^ mj]))
    return out


def singlet_project(v, i, j):
    """Orthogonal projection onto the states carrying a singlet on ``(i, j)``.

    Built as ``1/2 sum_R |R s_ij><R s_ij|`` over basis states ``R`` of the
    other atoms.
    """
    v = restrict_to_sector(v)
    n, k = v.basis.n, v.basis.k
    _check_pair(n, i, j)
    if v.exact:
        amps = [Fraction(0)] * len(v.basis)
        for a, b in _pair_blocks(n, k, i, j):
            # <R s_ij|v>; the overall sign of s_ij cancels in the projector
            overlap = v.amps[a] - v.amps[b]
            amps[a] += Fraction(1, 2) * overlap
            amps[b] -= Fraction(1, 2) * overlap
        return StateVector(v.basis, tuple(amps), True)
    arr = v.to_numpy()
    out = arr * 0
    for a, b in _pair_blocks(n, k, i, j):
        overlap = arr[a] - arr[b]
        out[a] += 0.5 * overlap
        out[b] -= 0.5 * overlap
    return StateVector(v.basis, out, False)


def antisymmetrizer_matrix(n, k, i, j):
    """Exact matrix of ``1 - (i j)`` on B(n, k)."""
    _check_pair(n, i, j)
    basis = sector(n, k)
    mi, mj = atom_mask(n, i), atom_mask(n, j)
    entries = {}
    for col, c in enumerate(basis.codes):
        row = basis.index_of[_swap_code(c, mi, mj)]
        entries[col, col] = entries.get((col, col), 0) + Fraction(1)
        entries[row, col] = entries.get((row, col), 0) - Fraction(1)
    return SparseOperator.from_dict(basis, basis, entries, exact=True)


def projector_matrix(n, k, i, j):
    """Exact matrix of the singlet projector on pair ``(i, j)``."""
    _check_pair(n, i, j)
    basis = sector(n, k)
    half = Fraction(1, 2)
    entries = {}
    for a, b in _pair_blocks(n, k, i, j):
        entries[a, a] = half
        entries[b, b] = half
        entries[a, b] = -half
        entries[b, a] = -half
    return SparseOperator.from_dict(basis, basis, entries, exact=True)


class NotDarkError(InvalidArgumentError):
    """Raised when a singlet decomposition is requested for a non-dark state."""

    def __init__(self, residual):
        super().__init__(f"state is not dark (lowering residual norm {residual:.6g})")
        self.residual = residual


@dataclass(frozen=True)
class SingletDecomposition:
    """``target = sum coefficients[i] * expand(family[i]) + residual vector``.

    ``residual`` is the exact squared norm of the residual vector.
    """

    target: StateVector
    family: tuple
    coefficients: tuple
    residual: Fraction

    def reconstruct(self):
        out = StateVector.zeros(self.target.basis)
        for m, c in zip(self.family, self.coefficients):
            if c:
                out = out + c * expand_matching(m)
        return out

    def to_json(self):
        return {
            "family": [m.to_json() for m in self.family],
            "coefficients": [f"{c.numerator}/{c.denominator}" for c in self.coefficients],
            "residual": f"{self.residual.numerator}/{self.residual.denominator}",
        }


def _check_dark(v):
    v = restrict_to_sector(v)
    if not v.exact:
        raise InvalidArgumentError("singlet decomposition needs an exact state")
    image = apply(lowering_matrix(v.basis.n, v.basis.k), v)
    if not image.is_zero():
        raise NotDarkError(image.norm())
    return v


def decompose_many(vectors, restrict="non_crossing_uncovered"):
    """Decompose several dark vectors of one sector with a single elimination."""
    vectors = [_check_dark(v) for v in vectors]
    if not vectors:
        return []
    basis = vectors[0].basis
    if any(v.basis != basis for v in vectors):
        raise InvalidArgumentError("all vectors must share one sector")
    n, k = basis.n, basis.k
    fam = tuple(enumerate_matchings(n, k, restrict))
    cols = [expand_matching(m).amps for m in fam]
    rows = [{c: col[r] for c, col in enumerate(cols) if col[r]} for r in range(len(basis))]
    sols = exact.solve(rows, len(fam), [v.amps for v in vectors])
    out = []
    for v, coeffs in zip(vectors, sols):
        if coeffs is None:
            raise ArithmeticError(
                f"dark state outside the span of the {restrict} singlet family for ({n},{k})"
            )
        dec = SingletDecomposition(v, fam, tuple(coeffs), Fraction(0))
        resid = v - dec.reconstruct()
        out.append(SingletDecomposition(v, fam, tuple(coeffs), resid.norm_sq()))
    return out


def singlet_decompose(v, restrict="non_crossing_uncovered"):
    """Write a dark state as a combination of singlet products.

    The restricted family is a basis of the dark subspace, so its coefficients
    are unique; with ``restrict="all"`` the pivot-ordered solution is returned.
    """
    return decompose_many([v], restrict)[0]


def _pair_span_generators(n, k):
    basis = sector(n, k)
    rows = []
    for i, j in combinations(range(1, n + 1), 2):
        for a, b in _pair_blocks(n, k, i, j):
            rows.append({a: 1, b: -1})
    return basis, rows


def pair_span_residual_sq(v):
    """Exact squared distance from ``v`` to the span of all pair-singlet subspaces."""
    v = restrict_to_sector(v)
    if not v.exact:
        raise InvalidArgumentError("exact state required")
    n, k = v.basis.n, v.basis.k
    if k < 1:
        raise InvalidArgumentError("pair-span residual needs k >= 1")
    basis, gens = _pair_span_generators(n, k)
    comp = exact.nullspace(gens, len(basis))
    if not comp:
        return Fraction(0)
    b = [sum(q[i] * v.amps[i] for i in range(len(basis)) if q[i]) for q in comp]
    gram = [[sum(x * y for x, y in zip(p, q)) for q in comp] for p in comp]
    (y,) = exact.solve(exact.as_rows(gram), len(comp), [b])
    return sum(bi * yi for bi, yi in zip(b, y))


def pair_span_residual(v):
    """Euclidean distance from ``v`` to the span of all pair-singlet subspaces."""
    return float(pair_span_residual_sq(v)) ** 0.5
