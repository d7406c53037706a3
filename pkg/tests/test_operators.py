from fractions import Fraction

import numpy as np
import pytest

from darkstates.darkspace import dark_basis
from darkstates.operators import (
    CompositeBasis,
    ModelParams,
    apply,
    build_full_tc_hamiltonian,
    build_rwa_hamiltonian,
    complement_permutation,
    embed_photons,
    lowering_matrix,
    raising_matrix,
    sector_interaction,
)
from darkstates.sector import sector
from darkstates.states import StateVector, atomic_state
from darkstates.validation import InvalidArgumentError

SIG = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1| on one atom


def kron_all(mats):
    out = np.eye(1)
    for m in mats:
        out = np.kron(out, m)
    return out


def collective_lowering(n, g):
    """Dense oracle on the full 2**n space; atom 1 is the most significant factor."""
    return sum(g[a] * kron_all([SIG if b == a else np.eye(2) for b in range(n)]) for a in range(n))


def dense_tc(n, g, wc, wa, m_max, rwa):
    dim_ph = m_max + 1
    a = np.diag(np.sqrt(np.arange(1, dim_ph)), 1)
    I_ph, I_at = np.eye(dim_ph), np.eye(2**n)
    H = wc * np.kron(a.T @ a, I_at)
    for k in range(n):
        sk = kron_all([SIG if b == k else np.eye(2) for b in range(n)])
        H += wa * np.kron(I_ph, sk.T @ sk)
        if rwa:
            H += g[k] * (np.kron(a.T, sk) + np.kron(a, sk.T))
        else:
            H += g[k] * np.kron(a + a.T, sk + sk.T)
    return H


def dense(op):
    return np.array(op.to_dense(), dtype=float)


def test_lowering_matches_dense_oracle():
    rng = np.random.default_rng(1)
    for n in range(1, 7):
        g = [Fraction(int(x)) for x in rng.integers(1, 5, size=n)]
        full = collective_lowering(n, [float(x) for x in g])
        for k in range(1, n + 1):
            L = lowering_matrix(n, k, g)
            rows, cols = list(sector(n, k - 1).codes), list(sector(n, k).codes)
            assert np.array_equal(dense(L), full[np.ix_(rows, cols)])


def test_lowering_examples():
    L = lowering_matrix(2, 1)
    assert dense(L).tolist() == [[1, 1]]
    L = lowering_matrix(4, 2)
    assert L.shape == (4, 6) and L.nnz == 12
    for n in range(1, 7):
        for k in range(1, n + 1):
            L = lowering_matrix(n, k)
            assert all(len(c) == k for c in L.columns())
            assert all(len(r) == n - k + 1 for r in L.rows)


def test_raising_is_transpose_of_lowering():
    for n in range(1, 11):
        for k in range(n):
            assert raising_matrix(n, k).same_entries(lowering_matrix(n, k + 1).transpose())
    R = raising_matrix(2, 0, (Fraction(2), Fraction(7)))
    assert dense(R).ravel().tolist() == [7, 2]  # rows 01, 10


def test_complement_symmetry():
    """Flipping every bit turns lowering on weight k into raising on weight n-k."""
    for n in range(1, 9):
        for k in range(1, n + 1):
            hi, lo = complement_permutation(n, k), complement_permutation(n, k - 1)
            L, R = dense(lowering_matrix(n, k)), dense(raising_matrix(n, n - k))
            assert np.array_equal(R[np.ix_(lo, hi)], L)


def test_rwa_hamiltonian_matches_dense_oracle():
    for n in range(1, 5):
        g = [0.5 + 0.25 * a for a in range(n)]
        p = ModelParams(n, tuple(Fraction(x) for x in g), 1.3, 0.7)
        for E in range(0, n + 2):
            H = build_rwa_hamiltonian(p, E)
            dense = dense_tc(n, g, 1.3, 0.7, E, rwa=True)
            idx = [m * 2**n + c for m, c in H.domain.keys]
            assert np.allclose(H.to_dense(), dense[np.ix_(idx, idx)], atol=1e-14)
            assert all(m + c.bit_count() == E for m, c in H.domain.keys)
            assert H.is_hermitian(0.0)


def test_full_hamiltonian_matches_dense_oracle():
    for n in range(1, 4):
        g = [1.0, 0.5, 0.25][:n]
        p = ModelParams(n, tuple(Fraction(x) for x in g), 0.9, 1.1)
        for m_max in (1, 3):
            H = build_full_tc_hamiltonian(p, m_max)
            assert np.allclose(H.to_dense(), dense_tc(n, g, 0.9, 1.1, m_max, rwa=False), atol=1e-14)
            assert H.is_hermitian(0.0)
    assert len(build_full_tc_hamiltonian(ModelParams(2)).domain) == 4 * 7  # default cutoff n+4


def test_rwa_examples():
    H = build_rwa_hamiltonian(ModelParams(1, (Fraction(3, 10),), 1.0, 1.0), 1)
    labels = [H.domain.label(i) for i in range(2)]
    assert labels == ["0|1", "1|0"]
    assert np.allclose(H.to_dense(), [[1.0, 0.3], [0.3, 1.0]])
    assert len(CompositeBasis.rwa(4, 2)) == 11


def test_full_tc_small_example():
    H = build_full_tc_hamiltonian(ModelParams(1, None, 0.0, 0.0), 1)
    b = H.domain
    assert H.entry(b.index((1, 1)), b.index((0, 0))) == 1.0
    assert H.entry(b.index((1, 0)), b.index((0, 1))) == 1.0


def test_rwa_commutes_with_excitation_number():
    for n in range(1, 6):
        H = build_full_tc_hamiltonian(ModelParams(n, None, 1.0, 1.0), 3).to_dense()
        dense_rwa = dense_tc(n, [1.0] * n, 1.0, 1.0, 3, rwa=True)
        N = np.diag(np.repeat(np.arange(4), 2**n) + np.tile([c.bit_count() for c in range(2**n)], 4))
        assert np.allclose(dense_rwa @ N, N @ dense_rwa)
        assert not np.allclose(H @ N, N @ H)


def test_dark_vacuum_is_eigenvector():
    for n in range(2, 6):
        for k in range(1, n // 2 + 1):
            p = ModelParams(n, None, 1.0, 0.8)
            H = build_rwa_hamiltonian(p, k)
            for v in dark_basis(n, k).vectors:
                x = embed_photons(v.to_float(), H.domain, 0)
                assert np.allclose(apply(H, x).to_numpy(), k * 0.8 * x.to_numpy())


def test_singlet_annihilated_by_full_interaction():
    H = build_full_tc_hamiltonian(ModelParams(2, None, 0.0, 0.0), 5)
    s = atomic_state({"01": 1.0, "10": -1.0}, exact=False)
    for m in range(6):
        x = embed_photons(s, H.domain, m)
        assert np.allclose(apply(H, x).to_numpy(), 0)
    ground = embed_photons(atomic_state({"00": 1.0}, exact=False), H.domain, 0)
    assert np.linalg.norm(apply(H, ground).to_numpy()) > 0


def test_apply_examples_and_errors():
    L = lowering_matrix(4, 2)
    v = atomic_state({"0011": 1, "0110": -1, "1001": -1, "1100": 1})
    assert apply(L, v).is_zero()
    assert apply(L, StateVector.zeros(sector(4, 2))).is_zero()
    with pytest.raises(InvalidArgumentError):
        apply(L, StateVector.zeros(sector(4, 1)))


def test_interaction_has_unit_entries():
    H = sector_interaction(4, 2)
    assert {v for _, _, v in H.entries()} <= {1.0, 2 ** 0.5}
    assert all(v == 1.0 for r, c, v in H.entries() if H.domain.keys[c][0] == 0)


def test_matrix_market_export():
    text = lowering_matrix(2, 1).to_matrix_market()
    assert text.startswith("%%MatrixMarket matrix coordinate")
    assert "1 2 2" in text


def test_model_params_validation():
    with pytest.raises(InvalidArgumentError):
        ModelParams(2, (0, 0))
    with pytest.raises(InvalidArgumentError):
        ModelParams(2, None, float("inf"))
    assert ModelParams(2, None, 1.5, 1.0).detuning == 0.5
