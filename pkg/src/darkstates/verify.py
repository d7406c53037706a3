"""Named invariant checks run by ``darkstates verify``."""

from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .darkspace import (
    constraint_rank,
    is_dark,
    dark_basis,
    dark_dimension,
    constraint_certificates,
    invisible_basis,
)
from .operators import (
    ModelParams,
    apply,
    build_full_tc_hamiltonian,
    build_rwa_hamiltonian,
    embed_photons,
    lowering_matrix,
    sector_interaction,
)
from .quanta import cancellation_pairing, quantize
from .sector import sector
from .singlets import antisymmetrizer_matrix, decompose_many, enumerate_matchings, projector_matrix
from .states import StateVector

__all__ = ["CHECKS", "VerificationError", "run_checks"]


class VerificationError(AssertionError):
    def __init__(self, name, detail):
        super().__init__(f"invariant '{name}' violated: {detail}")
        self.name = name
        self.detail = detail


def _grid(n_max, half=False):
    for n in range(1, n_max + 1):
        for k in range(0, n + 1):
            if not half or 2 * k <= n:
                yield n, k


def check_dimension(n_max):
    for n, k in _grid(n_max):
        got = dark_basis(n, k).dim
        if got != dark_dimension(n, k):
            return f"dim D({n},{k}) = {got}, formula gives {dark_dimension(n, k)}"


def check_random_combinations(n_max, seed=0):
    rng = np.random.default_rng(seed)
    for n, k in _grid(n_max):
        vecs = dark_basis(n, k).vectors
        if not vecs:
            continue
        coeffs = rng.integers(-5, 6, size=len(vecs))
        v = StateVector.zeros(sector(n, k))
        for c, b in zip(coeffs.tolist(), vecs):
            v = v + c * b
        if not is_dark(v):
            return f"random combination of the dark basis of ({n},{k}) is not dark"


def check_catalan(n_max):
    for k in range(1, n_max // 2 + 1):
        cat = comb(2 * k, k) // (k + 1)
        if dark_basis(2 * k, k).dim != cat:
            return f"dim D({2 * k},{k}) != Catalan({k}) = {cat}"


def check_witnesses(n_max):
    for n, k in _grid(n_max):
        if k == 0:
            continue
        low = lowering_matrix(n, k)
        kind, certs = constraint_certificates(n, k)
        op, space = (low, sector(n, k - 1)) if kind == "column" else (low.transpose(), sector(n, k))
        for j, v in certs.items():
            image = apply(op, v)
            if list(image.amps) != [Fraction(int(c == j)) for c in space.codes]:
                return f"{kind} certificate for {j:0{n}b} in ({n},{k}) is not an indicator"
        if constraint_rank(n, k) != min(len(sector(n, k - 1)), len(sector(n, k))):
            return f"constraint rank in ({n},{k}) is not full"


def check_singlets(n_max):
    for n, k in _grid(n_max, half=True):
        if k == 0:
            continue
        if len(enumerate_matchings(n, k, "non_crossing_uncovered")) != dark_dimension(n, k):
            return f"restricted matching count differs from dim D({n},{k})"
        for dec in decompose_many(dark_basis(n, k).vectors):
            if dec.residual != 0:
                return f"nonzero singlet residual in ({n},{k})"


def check_antisymmetrizer(n_max):
    for n in range(2, min(n_max, 6) + 1):
        for k in range(n + 1):
            for i, j in combinations(range(1, n + 1), 2):
                an = antisymmetrizer_matrix(n, k, i, j)
                two_p = projector_matrix(n, k, i, j)
                two_p = two_p.from_dict(
                    two_p.domain, two_p.codomain, {(r, c): 2 * v for r, c, v in two_p.entries()}, True
                )
                if not an.same_entries(two_p):
                    return f"An != 2P for pair ({i},{j}) in ({n},{k})"


def check_invisible(n_max):
    for n, k in _grid(n_max):
        inv = invisible_basis(n, k)
        want = dark_dimension(n, k) if 2 * k == n else 0
        if inv.dim != want:
            return f"invisible dimension {inv.dim} in ({n},{k}), expected {want}"
    if invisible_basis(2, 1, ("1", "2")).dim:
        return "unequal couplings at n=2 left invisible states"


def check_hermitian(n_max):
    for n in range(1, min(n_max, 4) + 1):
        p = ModelParams(n, None, 1.0, 0.5)
        for E in range(n + 2):
            if not build_rwa_hamiltonian(p, E).is_hermitian(1e-14):
                return f"RWA Hamiltonian not hermitian at n={n}, E={E}"
        if not build_full_tc_hamiltonian(p, 3).is_hermitian(1e-14):
            return f"full Hamiltonian not hermitian at n={n}"


def check_dark_eigenvectors(n_max):
    for n, k in _grid(min(n_max, 6)):
        if k == 0:
            continue
        H = sector_interaction(n, k)
        for v in dark_basis(n, k).vectors:
            if not apply(H, embed_photons(v, H.domain, 0)).is_zero():
                return f"dark vector of ({n},{k}) not annihilated by the interaction"


def check_quanta(n_max):
    basis = sector(3, 1)
    states = [
        StateVector(basis, (Fraction(1, 3), Fraction(2, 3), Fraction(2, 3))),
        StateVector(basis, (Fraction(1, 3), Fraction(1, 3), Fraction(-2, 3))),
    ]
    H = sector_interaction(3, 1)
    for v in states:
        for m in range(3, 7):
            eps = Fraction(1, 2**m)
            rep = cancellation_pairing(quantize(v, H, eps))
            if not rep.condition_q:
                return f"condition Q fails at eps=2^-{m}"
            if rep.shift_error > 2 * rep.c * float(eps) * len(basis):
                return f"shift error {rep.shift_error:g} too large at eps=2^-{m}"
            if rep.source_dark and not rep.pairs_same_family:
                return "cancelling pair from different families"


CHECKS = (
    ("dimension_theorem", check_dimension),
    ("dark_span_closed", check_random_combinations),
    ("catalan_diagonal", check_catalan),
    ("witness_certificates", check_witnesses),
    ("singlet_decomposition", check_singlets),
    ("antisymmetrizer_projector", check_antisymmetrizer),
    ("invisible_structure", check_invisible),
    ("hamiltonian_hermitian", check_hermitian),
    ("dark_vacuum_eigenvectors", check_dark_eigenvectors),
    ("quanta_condition_q", check_quanta),
)


def run_checks(n_max=6, fail_fast=True, seed=0):
    """Run every check up to ``n_max`` atoms; returns ``[(name, ok, detail)]``."""
    out = []
    for name, fn in CHECKS:
        detail = fn(n_max, seed) if fn is check_random_combinations else fn(n_max)
        out.append((name, detail is None, detail or ""))
        if detail and fail_fast:
            raise VerificationError(name, detail)
    return out
