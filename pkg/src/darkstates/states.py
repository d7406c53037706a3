"""State vectors over sector, full atomic, or atom-photon bases."""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .sector import AtomBasisState, SectorBasis, sector
from .validation import InvalidArgumentError, as_fraction

__all__ = [
    "FullAtomBasis",
    "StateVector",
    "atomic_state",
    "embed_full",
    "fraction_str",
    "restrict_to_sector",
]


@dataclass(frozen=True, eq=False)
class FullAtomBasis:
    """All ``2**n`` atomic configurations in numeric (lexicographic) order."""

    n: int

    def __len__(self):
        return 1 << self.n

    def __eq__(self, other):
        return isinstance(other, FullAtomBasis) and other.n == self.n

    def __hash__(self):
        return hash(("full", self.n))

    @property
    def codes(self):
        return range(1 << self.n)

    def index(self, code):
        return int(code)

    def label(self, idx):
        return format(idx, f"0{self.n}b")


def _index(basis, key):
    if isinstance(basis, SectorBasis):
        if isinstance(key, str):
            key = int(key, 2)
        elif isinstance(key, AtomBasisState):
            key = key.bits
        try:
            return basis.index_of[key]
        except KeyError:
            raise InvalidArgumentError(f"{key} not in sector ({basis.n},{basis.k})") from None
    if isinstance(basis, FullAtomBasis):
        if isinstance(key, str):
            key = int(key, 2)
        elif isinstance(key, AtomBasisState):
            key = key.bits
        return basis.index(key)
    return basis.index(key)


def fraction_str(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes over a basis.

    Exact vectors hold a tuple of ``Fraction``; float vectors hold a complex
    numpy array.  Arithmetic between the two modes promotes to float.
    """

    basis: object
    amps: object = field(repr=False)
    exact: bool = True

    def __post_init__(self):
        if len(self.amps) != len(self.basis):
            raise InvalidArgumentError(
                f"{len(self.amps)} amplitudes for a basis of size {len(self.basis)}"
            )

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, basis, exact=True):
        if exact:
            return cls(basis, (Fraction(0),) * len(basis), True)
        return cls(basis, np.zeros(len(basis), dtype=np.complex128), False)

    @classmethod
    def from_terms(cls, basis, terms, exact=True):
        """Build from ``{key: amplitude}``; keys are labels, codes or basis keys."""
        if exact:
            amps = [Fraction(0)] * len(basis)
            for key, val in terms.items():
                amps[_index(basis, key)] += as_fraction(val)
            return cls(basis, tuple(amps), True)
        amps = np.zeros(len(basis), dtype=np.complex128)
        for key, val in terms.items():
            amps[_index(basis, key)] += complex(val)
        return cls(basis, amps, False)

    @classmethod
    def from_array(cls, basis, arr):
        return cls(basis, np.asarray(arr, dtype=np.complex128).copy(), False)

    # views ---------------------------------------------------------------
    @property
    def dim(self):
        return len(self.amps)

    def to_numpy(self):
        if self.exact:
            return np.array([float(a) for a in self.amps], dtype=np.complex128)
        return np.asarray(self.amps, dtype=np.complex128)

    def to_float(self):
        return self if not self.exact else StateVector(self.basis, self.to_numpy(), False)

    def terms(self):
        """``{label: amplitude}`` over the nonzero amplitudes."""
        return {self.basis.label(i): a for i, a in enumerate(self.amps) if a != 0}

    def support(self):
        return [i for i, a in enumerate(self.amps) if a != 0]

    def is_zero(self, tol=0.0):
        if self.exact:
            return all(a == 0 for a in self.amps)
        return self.norm() <= tol

    def norm_sq(self):
        if self.exact:
            return sum(a * a for a in self.amps)
        return float(np.vdot(self.amps, self.amps).real)

    def norm(self):
        return float(self.norm_sq()) ** 0.5

    def dot(self, other):
        """Inner product ``<self|other>``."""
        self._check(other)
        if self.exact and other.exact:
            return sum(a * b for a, b in zip(self.amps, other.amps))
        return complex(np.vdot(self.to_numpy(), other.to_numpy()))

    def normalized(self):
        return self.to_float() * (1.0 / self.norm())

    # arithmetic ------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, StateVector) or other.basis != self.basis:
            raise InvalidArgumentError("state vectors live on different bases")

    def __add__(self, other):
        self._check(other)
        if self.exact and other.exact:
            return StateVector(self.basis, tuple(a + b for a, b in zip(self.amps, other.amps)))
        return StateVector(self.basis, self.to_numpy() + other.to_numpy(), False)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def __mul__(self, s):
        if self.exact and isinstance(s, (int, Fraction)):
            return StateVector(self.basis, tuple(a * s for a in self.amps))
        return StateVector(self.basis, self.to_numpy() * complex(s), False)

    __rmul__ = __mul__

    def equals(self, other, tol=0.0):
        """Exact equality in exact mode, max-norm ``tol`` otherwise."""
        self._check(other)
        if self.exact and other.exact:
            return tuple(self.amps) == tuple(other.amps)
        return float(np.max(np.abs(self.to_numpy() - other.to_numpy()), initial=0.0)) <= tol

    def to_json(self):
        if self.exact:
            return [fraction_str(a) for a in self.amps]
        arr = self.to_numpy()
        if np.all(arr.imag == 0):
            return [float(x) for x in arr.real]
        return [[float(x.real), float(x.imag)] for x in arr]


def atomic_state(terms, exact=True):
    """Atomic state from ``{"0110": amp, ...}``.

    Lands in the matching sector when all labels share one weight, otherwise
    in the full ``2**n`` space.
    """
    labels = list(terms)
    if not labels:
        raise InvalidArgumentError("need at least one term")
    ns = {len(lab) for lab in labels}
    if len(ns) != 1:
        raise InvalidArgumentError("labels have different lengths")
    n = ns.pop()
    weights = {lab.count("1") for lab in labels}
    basis = sector(n, weights.pop()) if len(weights) == 1 else FullAtomBasis(n)
    return StateVector.from_terms(basis, terms, exact)


@lru_cache(maxsize=64)
def _full_basis(n):
    return FullAtomBasis(n)


def restrict_to_sector(v):
    """View an atomic vector as a sector vector; mixed weights are rejected."""
    if isinstance(v.basis, SectorBasis):
        return v
    if not isinstance(v.basis, FullAtomBasis):
        raise InvalidArgumentError("expected an atomic state vector")
    sup = v.support()
    n = v.basis.n
    weights = {c.bit_count() for c in sup}
    if len(weights) > 1:
        raise InvalidArgumentError(
            f"state mixes excitation weights {sorted(weights)}; not in a single sector"
        )
    k = weights.pop() if weights else 0
    sb = sector(n, k)
    if v.exact:
        amps = tuple(v.amps[c] for c in sb.codes)
        return StateVector(sb, amps, True)
    return StateVector(sb, np.asarray(v.amps)[list(sb.codes)].copy(), False)


def embed_full(v):
    """Lift a sector vector into the full ``2**n`` atomic space."""
    if isinstance(v.basis, FullAtomBasis):
        return v
    fb = _full_basis(v.basis.n)
    if v.exact:
        amps = [Fraction(0)] * len(fb)
        for c, a in zip(v.basis.codes, v.amps):
            amps[c] = a
        return StateVector(fb, tuple(amps), True)
    amps = np.zeros(len(fb), dtype=np.complex128)
    amps[list(v.basis.codes)] = v.amps
    return StateVector(fb, amps, False)
