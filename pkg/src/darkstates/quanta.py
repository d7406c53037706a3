"""Amplitude quantization of a state under a Hamiltonian.

A state whose nonzero-amplitude columns of ``H`` are permutations of one
another can be cut into equal portions of amplitude (quanta), each with a
fixed source state, target state and phase type, such that the sum of the
moved quanta reproduces ``c * H |psi>`` up to an error linear in the
precision ``eps``.  For a dark state the moved quanta cancel in pairs, and
every cancelling pair comes from two members of one family.

Types are stored as powers of ``i``: 0 -> +1, 1 -> +i, 2 -> -1, 3 -> -i, so a
product of types is a sum mod 4 and negation adds 2.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .operators import CompositeBasis, SparseOperator, apply, embed_photons
from .sector import SectorBasis
from .states import StateVector
from .validation import InvalidArgumentError

__all__ = [
    "TYPES",
    "AmplitudeQuantum",
    "Quantization",
    "QuantizationReport",
    "EpsilonTooLargeError",
    "type_of",
    "type_part",
    "check_connected",
    "quantize",
    "theta_shift",
    "condition_q",
    "cancellation_pairing",
    "scaling_fit",
]

TYPES = (1, 1j, -1, -1j)
_TYPE_VALUES = np.array(TYPES, dtype=np.complex128)


class EpsilonTooLargeError(InvalidArgumentError):
    """The precision is too coarse: some column rounds to zero occurrences."""


def type_of(t):
    """Index (power of i) of an amplitude type given as ``1, 1j, -1, -1j``."""
    try:
        return TYPES.index(complex(t))
    except ValueError:
        raise InvalidArgumentError(f"{t!r} is not an amplitude type") from None


def type_part(z, t):
    """Part of ``z`` carried by type index ``t`` (0 when the sign disagrees)."""
    z = complex(z)
    if t == 0:
        return max(z.real, 0.0)
    if t == 2:
        return max(-z.real, 0.0)
    if t == 1:
        return max(z.imag, 0.0)
    return max(-z.imag, 0.0)


@dataclass(frozen=True)
class AmplitudeQuantum:
    size: Fraction
    id: int
    b_in: int
    b_fin: int
    t_in: complex
    t_fin: complex


def _parts(z):
    if isinstance(z, Fraction):
        return z, Fraction(0)
    z = complex(z)
    return Fraction(z.real), Fraction(z.imag)


def _round_half_down(q):
    """Nearest integer to ``q >= 0``; exact halves go toward zero."""
    whole = q.numerator // q.denominator
    return whole + 1 if q - whole > Fraction(1, 2) else whole


def _occurrences(z, eps):
    """Best ``eps`` approximation of ``z`` as ``[(count, type), ...]``."""
    re, im = _parts(z)
    out = []
    if re:
        out.append((_round_half_down(abs(re) / eps), 0 if re > 0 else 2))
    if im:
        out.append((_round_half_down(abs(im) / eps), 1 if im > 0 else 3))
    return out


def _column_key(col, ndigits=12):
    vals = []
    for _, v in col:
        z = complex(v)
        vals.append((round(z.real, ndigits), round(z.imag, ndigits)))
    return tuple(sorted(vals))


def _support_columns(sector_or_cols, H):
    if isinstance(sector_or_cols, SectorBasis):
        sb = sector_or_cols
        dom = H.domain
        if isinstance(dom, SectorBasis):
            return list(range(len(dom)))
        if isinstance(dom, CompositeBasis) and dom.mode == "rwa":
            m = dom.bound - sb.k
            return [dom.index_of[(m, c)] for c in sb.codes if (m, c) in dom.index_of]
        if isinstance(dom, CompositeBasis):
            return [dom.index_of[(0, c)] for c in sb.codes]
        raise InvalidArgumentError("cannot locate the sector inside the operator domain")
    return list(sector_or_cols)


def check_connected(sector_or_cols, H):
    """Column test for connectedness.

    True when the columns of ``H`` at the given states (a sector, or explicit
    column indices) hold the same multiset of nonzero entries.  This is the
    necessary condition that makes the quantization well defined.
    """
    cols = _support_columns(sector_or_cols, H)
    if len(cols) <= 1:
        return True
    all_cols = H.columns()
    keys = {_column_key(all_cols[c]) for c in cols}
    return len(keys) == 1


@dataclass(frozen=True, eq=False)
class Quantization:
    """A set of amplitude quanta, stored column-wise.

    ``epsilon`` is the precision used to round amplitudes and matrix
    entries; ``quantum_size = epsilon / nu`` is the amplitude each quantum
    carries and ``c = 1 / (nu * epsilon)`` the matching time scale.
    """

    source: StateVector
    hamiltonian: SparseOperator
    epsilon: Fraction
    nu: int
    quantum_size: Fraction
    c: Fraction
    b_in: np.ndarray = field(repr=False)
    b_fin: np.ndarray = field(repr=False)
    t_in: np.ndarray = field(repr=False)
    t_fin: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.b_in)

    @property
    def ids(self):
        return np.arange(len(self.b_in))

    def quantum(self, qid):
        return AmplitudeQuantum(
            self.quantum_size,
            int(qid),
            int(self.b_in[qid]),
            int(self.b_fin[qid]),
            TYPES[self.t_in[qid]],
            TYPES[self.t_fin[qid]],
        )

    def __iter__(self):
        for qid in range(len(self)):
            yield self.quantum(qid)

    def approximate_amplitudes(self):
        """Amplitude each source state receives back from its quanta."""
        return _typed_sums(self.b_in, self.t_in, len(self.source.basis)) * float(
            self.quantum_size
        )


def _typed_sums(index, types, size):
    counts = np.zeros((4, size), dtype=np.int64)
    for t in range(4):
        sel = types == t
        if np.any(sel):
            counts[t] = np.bincount(index[sel], minlength=size)
    return (counts[0] - counts[2]) + 1j * (counts[1] - counts[3])


def _embed(psi, H):
    if psi.basis == H.domain:
        return psi
    if isinstance(psi.basis, SectorBasis) and isinstance(H.domain, CompositeBasis):
        m = H.domain.bound - psi.basis.k if H.domain.mode == "rwa" else 0
        return embed_photons(psi, H.domain, m)
    raise InvalidArgumentError("state and Hamiltonian live on different bases")


def quantize(psi, H, epsilon):
    """Cut ``psi`` into amplitude quanta following ``H``.

    Each amplitude is rounded to a multiple of ``epsilon`` (ties toward
    zero), as is each matrix entry.  Every ``epsilon`` of amplitude at state
    ``j`` is split into ``nu`` quanta, ``nu`` being the number of
    ``epsilon``-occurrences in column ``j``; the ``s``-th quantum of a block
    follows the ``s``-th occurrence of the column (ordered by target state,
    real part before imaginary part).
    """
    psi = _embed(psi, H)
    eps = Fraction(epsilon)
    if eps <= 0:
        raise InvalidArgumentError("epsilon must be positive")
    support = psi.support()
    if not check_connected(support, H):
        raise InvalidArgumentError("state is not connected with respect to H")
    cols = H.columns()

    blocks = []
    nu = None
    for j in support:
        z_rows, z_types = [], []
        for i, h in cols[j]:
            if i == j:
                raise InvalidArgumentError(
                    "H has a diagonal entry on the support; quanta need b_in != b_fin"
                )
            for count, t in _occurrences(h, eps):
                z_rows.extend([i] * count)
                z_types.extend([t] * count)
        if nu is None:
            nu = len(z_rows)
        elif nu != len(z_rows):
            raise InvalidArgumentError("columns round to different occurrence counts")
        occ = [t for count, t in _occurrences(psi.amps[j], eps) for _ in range(count)]
        blocks.append((j, np.array(occ, dtype=np.int8), np.array(z_rows), np.array(z_types)))
    if not nu:
        raise EpsilonTooLargeError(f"epsilon={float(eps):g} rounds every matrix entry to zero")

    b_in, b_fin, t_in, t_fin = [], [], [], []
    for j, occ, z_rows, z_types in blocks:
        if not len(occ):
            continue
        t_block = np.repeat(occ, nu)
        b_in.append(np.full(len(t_block), j, dtype=np.int64))
        b_fin.append(np.tile(z_rows, len(occ)))
        t_in.append(t_block)
        t_fin.append((t_block + np.tile(z_types, len(occ))) % 4)

    def cat(parts, dtype):
        return np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype=dtype)

    return Quantization(
        psi,
        H,
        eps,
        nu,
        eps / nu,
        1 / (nu * eps),
        cat(b_in, np.int64),
        cat(b_fin, np.int64),
        cat(t_in, np.int8),
        cat(t_fin, np.int8),
    )


def theta_shift(theta):
    """State obtained by moving every quantum to its final state and type."""
    size = len(theta.source.basis)
    mu = _typed_sums(theta.b_fin, theta.t_fin, size) * float(theta.quantum_size)
    return StateVector(theta.source.basis, mu.astype(np.complex128), False)


def condition_q(theta):
    """No two quanta with one state transition may end with cancelling values.

    Checks both clauses: equal initial types with opposite final types, and
    opposite initial types.
    """
    if not len(theta):
        return True
    dim = len(theta.source.basis)
    key = theta.b_in * dim + theta.b_fin
    triples = np.unique(np.stack([key, theta.t_in, theta.t_fin]), axis=1)
    groups = {}
    for k, ti, tf in triples.T:
        groups.setdefault(int(k), set()).add((int(ti), int(tf)))
    for pairs in groups.values():
        tins = {ti for ti, _ in pairs}
        if any((ti + 2) % 4 in tins for ti in tins):
            return False
        if any((ti, (tf + 2) % 4) in pairs for ti, tf in pairs):
            return False
    return True


@dataclass
class QuantizationReport:
    epsilon: float
    quantum_size: float
    nu: int
    c: float
    n_quanta: int
    amp_error: float
    passage_error: float
    shift_error: float
    cancelled_fraction: float
    n_pairs: int
    condition_q: bool
    source_dark: bool
    pairs_same_family: bool = None
    pairs_distinct_initial: int = 0
    pairs: np.ndarray = field(default=None, repr=False)

    def to_json(self):
        return {
            "epsilon": self.epsilon,
            "quantum_size": self.quantum_size,
            "nu": self.nu,
            "c": self.c,
            "n_quanta": self.n_quanta,
            "amp_error": self.amp_error,
            "passage_error": self.passage_error,
            "shift_error": self.shift_error,
            "cancelled_fraction": self.cancelled_fraction,
            "n_pairs": self.n_pairs,
            "condition_q": self.condition_q,
            "source_dark": self.source_dark,
            "pairs_same_family": self.pairs_same_family,
            "pairs_distinct_initial": self.pairs_distinct_initial,
        }


def _amp_error(theta):
    approx = theta.approximate_amplitudes()
    return float(np.max(np.abs(approx - theta.source.to_numpy()), initial=0.0))


def _passage_error(theta):
    """Largest mismatch between a transition's quanta and its share of ``c H psi``.

    The share for ``(i, j, t_i, t_j)`` is ``c [psi_j]_{t_j} [H_ij]_{t_i/t_j}``:
    the ``t_j`` part of the amplitude times the part of the matrix entry that
    turns type ``t_j`` into ``t_i``.
    """
    size = float(theta.quantum_size)
    c = float(theta.c)
    dim = len(theta.source.basis)
    counts = {}
    if len(theta):
        key = ((theta.b_fin * dim + theta.b_in) * 4 + theta.t_fin) * 4 + theta.t_in
        uniq, cnt = np.unique(key, return_counts=True)
        counts = dict(zip(uniq.tolist(), cnt.tolist()))
    targets = {}
    cols = theta.hamiltonian.columns()
    for j in theta.source.support():
        lam = theta.source.amps[j]
        for tj in range(4):
            lp = type_part(lam, tj)
            if not lp:
                continue
            for i, h in cols[j]:
                for tp in range(4):
                    hp = type_part(h, tp)
                    if hp:
                        ti = (tj + tp) % 4
                        key = ((i * dim + j) * 4 + ti) * 4 + tj
                        targets[key] = targets.get(key, 0.0) + c * lp * hp
    err = 0.0
    for key in set(counts) | set(targets):
        err = max(err, abs(size * counts.get(key, 0) - targets.get(key, 0.0)))
    return err


def _pair_quanta(theta):
    """Greedy pairing of quanta at one final state with opposite final types."""
    pairs = []
    if not len(theta):
        return np.zeros((0, 2), dtype=np.int64)
    order = np.lexsort((np.arange(len(theta)), theta.t_fin, theta.b_fin))
    b_sorted = theta.b_fin[order]
    bounds = np.flatnonzero(np.diff(b_sorted)) + 1
    for grp in np.split(order, bounds):
        tf = theta.t_fin[grp]
        for pos in (0, 1):
            a = grp[tf == pos]
            b = grp[tf == pos + 2]
            m = min(len(a), len(b))
            if m:
                pairs.append(np.stack([a[:m], b[:m]], axis=1))
    return np.concatenate(pairs) if pairs else np.zeros((0, 2), dtype=np.int64)


def cancellation_pairing(theta, dark_tol=1e-12):
    """Pair off cancelling quanta and report every approximation error.

    For a dark source the uncancelled fraction vanishes with ``epsilon``; for
    other sources the numbers are reported without that expectation.
    """
    from .sector import emission_related  # local: keeps module import light

    psi = theta.source
    hpsi = apply(theta.hamiltonian, psi.to_float())
    shift = theta_shift(theta)
    c = float(theta.c)
    shift_error = float(np.linalg.norm(shift.to_numpy() - c * hpsi.to_numpy()))
    pairs = _pair_quanta(theta)
    n = len(theta)

    same_family = None
    distinct = 0
    basis = psi.basis
    if len(pairs):
        a_in, b_in = theta.b_in[pairs[:, 0]], theta.b_in[pairs[:, 1]]
        distinct = int(np.count_nonzero(a_in != b_in))
        if isinstance(basis, CompositeBasis):
            nat = basis.n
            same_family = True
            fin = theta.b_fin[pairs[:, 0]]
            seen = set()
            for x, y, f in zip(a_in.tolist(), b_in.tolist(), fin.tolist()):
                if (x, y, f) in seen:
                    continue
                seen.add((x, y, f))
                cf = basis.keys[f][1]
                for src in (x, y):
                    from .sector import AtomBasisState

                    if not emission_related(
                        AtomBasisState(nat, basis.keys[src][1]), AtomBasisState(nat, cf)
                    ):
                        same_family = False

    return QuantizationReport(
        epsilon=float(theta.epsilon),
        quantum_size=float(theta.quantum_size),
        nu=theta.nu,
        c=c,
        n_quanta=n,
        amp_error=_amp_error(theta),
        passage_error=_passage_error(theta),
        shift_error=shift_error,
        cancelled_fraction=(2 * len(pairs) / n) if n else 1.0,
        n_pairs=len(pairs),
        condition_q=condition_q(theta),
        source_dark=hpsi.norm() <= dark_tol,
        pairs_same_family=same_family,
        pairs_distinct_initial=distinct,
        pairs=pairs,
    )


def scaling_fit(epsilons, errors):
    """Linear-order summary of an error sequence over halving precisions.

    Returns ``(K, step_ratios, fitted_ratio)``: the smallest ``K`` with
    ``error <= K * eps`` on every point, the successive ratios
    ``error(eps/2) / error(eps)``, and ``2**-slope`` from a least-squares
    fit of ``log error`` against ``log eps``.
    """
    eps = np.asarray(epsilons, dtype=float)
    err = np.asarray(errors, dtype=float)
    K = float(np.max(err / eps))
    ratios = [float(b / a) if a else math.nan for a, b in zip(err[:-1], err[1:])]
    pos = err > 0
    if pos.sum() >= 2:
        slope = float(np.polyfit(np.log2(eps[pos]), np.log2(err[pos]), 1)[0])
        fitted = 2.0 ** (-slope)
    else:
        fitted = math.nan
    return K, ratios, fitted
