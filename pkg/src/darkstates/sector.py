"""Fixed-weight basis sectors and the emission / family / rank combinatorics.

A basis state of ``n`` atoms is an ``n``-bit string read left to right, atom 1
first.  As an integer, atom 1 is the most significant bit, so lexicographic
order of the strings is plain numeric order of the codes.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .validation import InvalidArgumentError, check_atoms, check_weight

__all__ = [
    "AtomBasisState",
    "SectorBasis",
    "FamilyTable",
    "RankAssignment",
    "atom_mask",
    "enumerate_sector",
    "sector",
    "emission_related",
    "family",
    "transposition_distance",
    "rank_assignment",
]


def atom_mask(n, atom):
    """Bit mask of 1-based ``atom`` in an ``n``-atom code."""
    return 1 << (n - atom)


@dataclass(frozen=True, order=True)
class AtomBasisState:
    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError(f"atom count must be >= 1, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise InvalidArgumentError(f"bits {self.bits} out of range for n={self.n}")

    @classmethod
    def from_label(cls, label):
        label = label.strip().strip("|⟩>")
        if not label or set(label) - {"0", "1"}:
            raise InvalidArgumentError(f"not a bit string: {label!r}")
        return cls(len(label), int(label, 2))

    @property
    def weight(self):
        return self.bits.bit_count()

    @property
    def label(self):
        return format(self.bits, f"0{self.n}b")

    def atom(self, i):
        """State (0 or 1) of 1-based atom ``i``."""
        return (self.bits >> (self.n - i)) & 1

    def __str__(self):
        return self.label


def _as_state(x, n=None):
    if isinstance(x, AtomBasisState):
        return x
    if isinstance(x, str):
        return AtomBasisState.from_label(x)
    if n is None:
        raise InvalidArgumentError("integer codes need an explicit atom count")
    return AtomBasisState(n, int(x))


def _weight_codes(n, k):
    """All ``n``-bit codes of weight ``k`` in increasing order (Gosper's hack)."""
    if k == 0:
        return (0,)
    out = []
    v = (1 << k) - 1
    limit = 1 << n
    while v < limit:
        out.append(v)
        c = v & -v
        r = v + c
        v = (((r ^ v) >> 2) // c) | r
    return tuple(out)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Lexicographically ordered weight-``k`` states of ``n`` atoms.

    Ranking uses the combinatorial number system: a code with set bit
    positions ``c_1 < ... < c_k`` (LSB = 0) sits at index
    ``sum C(c_i, i)``, which coincides with numeric order.
    """

    n: int
    k: int
    codes: tuple = field(repr=False)
    index_of: dict = field(repr=False)

    def __len__(self):
        return len(self.codes)

    def __eq__(self, other):
        return isinstance(other, SectorBasis) and (self.n, self.k) == (other.n, other.k)

    def __hash__(self):
        return hash(("sector", self.n, self.k))

    @property
    def states(self):
        return [AtomBasisState(self.n, c) for c in self.codes]

    @property
    def labels(self):
        return [format(c, f"0{self.n}b") for c in self.codes]

    def label(self, idx):
        return format(self.codes[idx], f"0{self.n}b")

    def rank(self, bits):
        """Index of ``bits`` without a hash lookup."""
        if isinstance(bits, AtomBasisState):
            bits = bits.bits
        if bits.bit_count() != self.k or bits >> self.n:
            raise InvalidArgumentError(f"{bits:b} is not in sector ({self.n},{self.k})")
        r, i, pos = 0, 1, 0
        while bits:
            if bits & 1:
                r += comb(pos, i)
                i += 1
            bits >>= 1
            pos += 1
        return r

    def unrank(self, r):
        if not 0 <= r < len(self.codes):
            raise InvalidArgumentError(f"index {r} outside sector of size {len(self.codes)}")
        bits = 0
        for i in range(self.k, 0, -1):
            c = i - 1
            while comb(c + 1, i) <= r:
                c += 1
            r -= comb(c, i)
            bits |= 1 << c
        return bits


@lru_cache(maxsize=256)
def sector(n, k):
    """Sector without range validation; out-of-range ``k`` gives an empty basis."""
    if k < 0 or k > n:
        codes = ()
    else:
        codes = _weight_codes(n, k)
    return SectorBasis(n, k, codes, {c: i for i, c in enumerate(codes)})


def enumerate_sector(n, k, cap=None):
    """The sector B(n, k): all states of ``n`` atoms with ``k`` excitations."""
    n = check_atoms(n, cap)
    k = check_weight(n, k)
    return sector(n, k)


def emission_related(j, j2):
    """True iff ``j2`` arises from ``j`` by de-exciting exactly one atom."""
    j, j2 = _as_state(j), _as_state(j2)
    if j.n != j2.n:
        raise InvalidArgumentError(f"atom counts differ: {j.n} vs {j2.n}")
    return j2.weight == j.weight - 1 and (j2.bits & ~j.bits) == 0


@dataclass(frozen=True)
class FamilyTable:
    parent: AtomBasisState
    members: tuple

    def __len__(self):
        return len(self.members)


def family(parent):
    """All states that emit a photon into ``parent``: flip one 0 to 1."""
    parent = _as_state(parent)
    n, b = parent.n, parent.bits
    members = sorted(b | atom_mask(n, a) for a in range(1, n + 1) if not b & atom_mask(n, a))
    return FamilyTable(parent, tuple(AtomBasisState(n, m) for m in members))


def transposition_distance(j1, j2):
    """Minimum number of qubit transpositions turning ``j1`` into ``j2``."""
    j1, j2 = _as_state(j1), _as_state(j2)
    if j1.n != j2.n:
        raise InvalidArgumentError(f"atom counts differ: {j1.n} vs {j2.n}")
    if j1.weight != j2.weight:
        raise InvalidArgumentError("transpositions preserve weight; weights differ")
    return (j1.bits & ~j2.bits).bit_count()


@dataclass(frozen=True)
class RankAssignment:
    """Ranks relative to a reference parent ``j0``.

    Maps are keyed by integer codes.  ``rem[j']`` holds the 1-based atoms that
    are excited in ``j0`` and relaxed in ``j'``.
    """

    n: int
    k: int
    j0: AtomBasisState
    ancestor_rank: dict
    member_rank: dict
    rem: dict

    def family_rank_counts(self, parent):
        """``{rank: count}`` over the members of ``parent``'s family."""
        parent = _as_state(parent, self.n)
        counts = {}
        for m in family(parent).members:
            r = self.member_rank[m.bits]
            counts[r] = counts.get(r, 0) + 1
        return counts


def rank_assignment(n, k, j0):
    j0 = _as_state(j0, n)
    if j0.n != n:
        raise InvalidArgumentError(f"reference state has {j0.n} atoms, expected {n}")
    if not 1 <= k <= n or j0.weight != k - 1:
        raise InvalidArgumentError(f"reference must have weight k-1={k - 1}")
    b0 = j0.bits
    ancestor_rank = {}
    rem = {}
    for c in sector(n, k - 1).codes:
        diff = b0 & ~c
        ancestor_rank[c] = diff.bit_count()
        rem[c] = frozenset(a for a in range(1, n + 1) if diff & atom_mask(n, a))
    member_rank = {}
    for c in sector(n, k).codes:
        best = None
        x = c
        while x:
            low = x & -x
            p = ancestor_rank[c ^ low]
            if best is None or p < best:
                best = p
            x ^= low
        member_rank[c] = best
    return RankAssignment(n, k, j0, ancestor_rank, member_rank, rem)
