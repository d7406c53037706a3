"""Collective ladder operators and Tavis-Cummings Hamiltonians.

Ladder operators act on atomic sectors and are exact (rational couplings).
Hamiltonians act on atom-photon bases and are floating point because of the
``sqrt(m + 1)`` Fock factors.  Units: hbar = 1.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .sector import SectorBasis, atom_mask, sector
from .states import FullAtomBasis, StateVector, restrict_to_sector
from .validation import InvalidArgumentError, check_atoms, check_couplings

__all__ = [
    "CompositeBasis",
    "ModelParams",
    "SparseOperator",
    "lowering_matrix",
    "raising_matrix",
    "build_rwa_hamiltonian",
    "build_full_tc_hamiltonian",
    "sector_interaction",
    "apply",
    "embed_photons",
    "atomic_part",
    "complement_permutation",
]


@dataclass(frozen=True, eq=False)
class CompositeBasis:
    """Atom-photon product states ``(m, atoms)``.

    ``mode="rwa"`` holds the fixed total excitation ``E = m + weight``;
    ``mode="cutoff"`` holds every ``m <= m_max`` crossed with all ``2**n``
    atomic states.  Ordering: photon number first, then atomic code.
    """

    n: int
    mode: str
    bound: int
    keys: tuple = field(repr=False)
    index_of: dict = field(repr=False)

    @classmethod
    def rwa(cls, n, E):
        if E < 0:
            raise InvalidArgumentError(f"total excitation must be >= 0, got {E}")
        keys = []
        for m in range(E + 1):
            w = E - m
            if w <= n:
                keys.extend((m, c) for c in sector(n, w).codes)
        keys = tuple(keys)
        return cls(n, "rwa", E, keys, {key: i for i, key in enumerate(keys)})

    @classmethod
    def cutoff(cls, n, m_max):
        if m_max < 1:
            raise InvalidArgumentError(f"photon cutoff must be >= 1, got {m_max}")
        keys = tuple((m, c) for m in range(m_max + 1) for c in range(1 << n))
        return cls(n, "cutoff", m_max, keys, {key: i for i, key in enumerate(keys)})

    def __len__(self):
        return len(self.keys)

    def __eq__(self, other):
        return (
            isinstance(other, CompositeBasis)
            and (self.n, self.mode, self.bound) == (other.n, other.mode, other.bound)
        )

    def __hash__(self):
        return hash((self.n, self.mode, self.bound))

    def index(self, key):
        if isinstance(key, str):
            m, _, bits = key.partition("|")
            key = (int(m), int(bits, 2))
        try:
            return self.index_of[tuple(key)]
        except KeyError:
            raise InvalidArgumentError(f"{key} not in basis") from None

    def label(self, idx):
        m, c = self.keys[idx]
        return f"{m}|{c:0{self.n}b}"

    @cached_property
    def photons(self):
        return np.array([m for m, _ in self.keys], dtype=float)

    @cached_property
    def excitations(self):
        return np.array([c.bit_count() for _, c in self.keys], dtype=float)


@dataclass(frozen=True)
class ModelParams:
    """Tavis-Cummings parameters; detuning is ``omega_c - omega_a``."""

    n: int
    couplings: tuple = None
    omega_c: float = 1.0
    omega_a: float = 1.0

    def __post_init__(self):
        check_atoms(self.n)
        object.__setattr__(self, "couplings", check_couplings(self.n, self.couplings))
        for name in ("omega_c", "omega_a"):
            w = getattr(self, name)
            if not math.isfinite(w) or w < 0:
                raise InvalidArgumentError(f"{name} must be finite and >= 0, got {w}")

    @property
    def detuning(self):
        return self.omega_c - self.omega_a


class SparseOperator:
    """Row-compressed operator between two bases.

    ``rows[r]`` is a list of ``(column, value)`` sorted by column, without
    explicit zeros.  Values are all ``Fraction`` (exact) or all numeric
    (float mode).
    """

    def __init__(self, domain, codomain, rows, exact):
        if len(rows) != len(codomain):
            raise InvalidArgumentError("row count does not match codomain")
        self.domain = domain
        self.codomain = codomain
        self.exact = exact
        self.rows = [sorted((c, v) for c, v in r if v != 0) for r in rows]

    @classmethod
    def from_dict(cls, domain, codomain, entries, exact):
        """Build from ``{(row, col): value}``; duplicate keys must be pre-summed."""
        rows = [[] for _ in range(len(codomain))]
        for (r, c), v in entries.items():
            rows[r].append((c, v))
        return cls(domain, codomain, rows, exact)

    @property
    def shape(self):
        return (len(self.codomain), len(self.domain))

    @property
    def nnz(self):
        return sum(len(r) for r in self.rows)

    def entries(self):
        for r, row in enumerate(self.rows):
            for c, v in row:
                yield r, c, v

    def entry(self, r, c):
        for cc, v in self.rows[r]:
            if cc == c:
                return v
        return Fraction(0) if self.exact else 0.0

    def columns(self):
        """Column view: list of ``[(row, value), ...]`` per column."""
        cols = [[] for _ in range(len(self.domain))]
        for r, c, v in self.entries():
            cols[c].append((r, v))
        return cols

    def transpose(self):
        rows = [[] for _ in range(len(self.domain))]
        for r, c, v in self.entries():
            rows[c].append((r, v))
        return SparseOperator(self.codomain, self.domain, rows, self.exact)

    def conj_transpose(self):
        if self.exact:
            return self.transpose()
        rows = [[] for _ in range(len(self.domain))]
        for r, c, v in self.entries():
            rows[c].append((r, np.conj(v)))
        return SparseOperator(self.codomain, self.domain, rows, False)

    def same_entries(self, other, tol=0.0):
        if self.shape != other.shape:
            return False
        if self.exact and other.exact:
            return self.rows == other.rows
        diff = self.to_scipy() - other.to_scipy()
        return diff.nnz == 0 or float(abs(diff).max()) <= tol

    def is_hermitian(self, tol=0.0):
        if self.domain != self.codomain:
            return False
        return self.same_entries(self.conj_transpose(), tol)

    def to_rows(self):
        """Rows as ``{col: value}`` dicts for :mod:`darkstates.exact`."""
        return [dict(r) for r in self.rows]

    def to_dense(self):
        if self.exact:
            out = [[Fraction(0)] * self.shape[1] for _ in range(self.shape[0])]
            for r, c, v in self.entries():
                out[r][c] = v
            return out
        return self.to_scipy().toarray()

    @cached_property
    def _csr(self):
        m, n = self.shape
        data, ind, ptr = [], [], [0]
        for row in self.rows:
            for c, v in row:
                ind.append(c)
                data.append(complex(v))
            ptr.append(len(ind))
        arr = np.array(data, dtype=np.complex128)
        if not np.any(arr.imag):
            arr = arr.real.copy()
        return sp.csr_matrix((arr, np.array(ind, dtype=np.int64), np.array(ptr)), shape=(m, n))

    def to_scipy(self):
        return self._csr.copy()

    def to_matrix_market(self):
        """Matrix Market coordinate text (1-based indices)."""
        vals = [v for _, _, v in self.entries()]
        if self.exact and all(Fraction(v).denominator == 1 for v in vals):
            field_, fmt = "integer", lambda v: str(int(v))
        elif all(np.imag(complex(v)) == 0 for v in vals):
            field_, fmt = "real", lambda v: repr(float(v))
        else:
            field_ = "complex"
            fmt = lambda v: f"{complex(v).real!r} {complex(v).imag!r}"  # noqa: E731
        lines = [
            f"%%MatrixMarket matrix coordinate {field_} general",
            f"{self.shape[0]} {self.shape[1]} {self.nnz}",
        ]
        lines.extend(f"{r + 1} {c + 1} {fmt(v)}" for r, c, v in self.entries())
        return "\n".join(lines) + "\n"

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"SparseOperator(shape={self.shape}, nnz={self.nnz}, {mode})"


def _ladder_rows(n, k, couplings, raising):
    src = sector(n, k)
    dst = sector(n, k + 1 if raising else k - 1)
    rows = [[] for _ in range(len(dst))]
    for col, code in enumerate(src.codes):
        for a in range(1, n + 1):
            mask = atom_mask(n, a)
            if bool(code & mask) == raising:
                continue
            g = couplings[a - 1]
            if g:
                rows[dst.index_of[code ^ mask]].append((col, g))
    return src, dst, rows


def lowering_matrix(n, k, couplings=None):
    """Collective lowering ``sum_a g_a sigma_a`` from B(n, k) to B(n, k-1)."""
    n = check_atoms(n)
    if not 0 <= k <= n:
        raise InvalidArgumentError(f"need 0 <= k <= n, got k={k}")
    g = check_couplings(n, couplings)
    src, dst, rows = _ladder_rows(n, k, g, raising=False)
    return SparseOperator(src, dst, rows, exact=True)


def raising_matrix(n, k, couplings=None):
    """Collective raising ``sum_a g_a sigma_a^+`` from B(n, k) to B(n, k+1)."""
    n = check_atoms(n)
    if not 0 <= k <= n:
        raise InvalidArgumentError(f"need 0 <= k <= n, got k={k}")
    g = check_couplings(n, couplings)
    src, dst, rows = _ladder_rows(n, k, g, raising=True)
    return SparseOperator(src, dst, rows, exact=True)


def complement_permutation(n, k):
    """Index map B(n, k) -> B(n, n-k) induced by flipping every bit."""
    full = (1 << n) - 1
    dst = sector(n, n - k)
    return [dst.index_of[c ^ full] for c in sector(n, k).codes]


def _float_couplings(params):
    return [float(g) for g in params.couplings]


def build_rwa_hamiltonian(params, E):
    """RWA Hamiltonian on the sector of total excitation ``E``.

    Diagonal ``m*omega_c + weight*omega_a``; off-diagonal
    ``sqrt(m+1) g_a`` between ``(m, j)`` and ``(m+1, j - atom a)``.
    """
    basis = CompositeBasis.rwa(params.n, E)
    g = _float_couplings(params)
    n = params.n
    entries = {}
    for idx, (m, c) in enumerate(basis.keys):
        diag = m * params.omega_c + c.bit_count() * params.omega_a
        if diag:
            entries[idx, idx] = diag
        for a in range(1, n + 1):
            mask = atom_mask(n, a)
            if c & mask and g[a - 1]:
                jdx = basis.index_of[(m + 1, c ^ mask)]
                val = math.sqrt(m + 1) * g[a - 1]
                entries[jdx, idx] = val
                entries[idx, jdx] = val
    return SparseOperator.from_dict(basis, basis, entries, exact=False)


def build_full_tc_hamiltonian(params, m_max=None):
    """Full Tavis-Cummings Hamiltonian with a photon cutoff.

    Interaction ``sum_a g_a (a + a^+)(sigma_a + sigma_a^+)``; transitions to
    ``m > m_max`` are dropped.  ``m_max`` defaults to ``n + 4``.
    """
    m_max = params.n + 4 if m_max is None else m_max
    basis = CompositeBasis.cutoff(params.n, m_max)
    g = _float_couplings(params)
    n = params.n
    entries = {}
    for idx, (m, c) in enumerate(basis.keys):
        diag = m * params.omega_c + c.bit_count() * params.omega_a
        if diag:
            entries[idx, idx] = diag
        if m == m_max:
            continue
        # couple (m, c) -> (m+1, c ^ atom); the hermitian partner covers m-1
        for a in range(1, n + 1):
            if not g[a - 1]:
                continue
            jdx = basis.index_of[(m + 1, c ^ atom_mask(n, a))]
            val = math.sqrt(m + 1) * g[a - 1]
            entries[jdx, idx] = val
            entries[idx, jdx] = val
    return SparseOperator.from_dict(basis, basis, entries, exact=False)


def sector_interaction(n, k):
    """RWA interaction on total excitation ``k`` with every coupling 1.

    Equals ``H_RWA - k*omega*I`` at zero detuning after rescaling time.
    """
    return build_rwa_hamiltonian(ModelParams(n, None, 0.0, 0.0), k)


def embed_photons(v, basis, m=0):
    """Tensor an atomic vector with the Fock state ``|m>`` inside ``basis``."""
    if not isinstance(basis, CompositeBasis):
        raise InvalidArgumentError("target must be a CompositeBasis")
    if isinstance(v.basis, (SectorBasis, FullAtomBasis)):
        codes = list(v.basis.codes)
    else:
        raise InvalidArgumentError("expected an atomic state vector")
    if v.basis.n != basis.n:
        raise InvalidArgumentError("atom counts differ")
    if v.exact:
        amps = [Fraction(0)] * len(basis)
    else:
        amps = np.zeros(len(basis), dtype=np.complex128)
    for c, a in zip(codes, v.amps):
        if a == 0:
            continue
        key = (m, c)
        if key not in basis.index_of:
            raise InvalidArgumentError(f"state {m}|{c:0{basis.n}b} is outside the basis")
        amps[basis.index_of[key]] = a
    return StateVector(basis, tuple(amps) if v.exact else amps, v.exact)


def atomic_part(v, m=0):
    """Atomic amplitudes of the photon-number-``m`` slice of ``v`` (full space)."""
    fb = FullAtomBasis(v.basis.n)
    amps = np.zeros(len(fb), dtype=np.complex128)
    arr = v.to_numpy()
    for idx, (mm, c) in enumerate(v.basis.keys):
        if mm == m:
            amps[c] = arr[idx]
    return StateVector(fb, amps, False)


def apply(op, v):
    """Apply ``op`` to ``v``; exact when both are exact."""
    if not isinstance(v, StateVector):
        raise InvalidArgumentError("expected a StateVector")
    if v.basis != op.domain:
        if isinstance(op.domain, SectorBasis) and isinstance(v.basis, FullAtomBasis):
            v = restrict_to_sector(v)
        if v.basis != op.domain:
            raise InvalidArgumentError("vector basis does not match operator domain")
    if op.exact and v.exact:
        amps = v.amps
        out = []
        for row in op.rows:
            s = Fraction(0)
            for c, val in row:
                a = amps[c]
                if a:
                    s += val * a
            out.append(s)
        return StateVector(op.codomain, tuple(out), True)
    return StateVector(op.codomain, op._csr @ v.to_numpy(), False)
