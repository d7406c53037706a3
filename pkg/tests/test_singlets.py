from fractions import Fraction
from itertools import combinations
from math import comb, prod

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darkstates import exact
from darkstates.darkspace import dark_basis, dark_dimension, is_dark
from darkstates.singlets import (
    Matching,
    NotDarkError,
    antisymmetrize,
    antisymmetrizer_matrix,
    decompose_many,
    enumerate_matchings,
    expand_matching,
    pair_span_residual,
    pair_span_residual_sq,
    projector_matrix,
    singlet_decompose,
    singlet_project,
    swap_atoms,
)
from darkstates.sector import sector
from darkstates.states import StateVector, atomic_state
from darkstates.validation import InvalidArgumentError

F = Fraction
S42_1 = {"0011": 1, "0110": -1, "1001": -1, "1100": 1}
S42_2 = {"0101": 1, "0110": -1, "1001": -1, "1010": 1}
S42_3 = {"0011": 1, "0101": -1, "1010": -1, "1100": 1}


def double_factorial(m):
    return prod(range(m, 0, -2)) if m > 0 else 1


def test_matching_validation_and_json():
    m = Matching(4, ((3, 4), (1, 2)))
    assert m.pairs == ((1, 2), (3, 4)) and m.k == 2 and m.singles == ()
    assert Matching.from_json(m.to_json()) == m
    assert str(m) == "(12)(34)"
    with pytest.raises(InvalidArgumentError):
        Matching(4, ((1, 2), (2, 3)))
    with pytest.raises(InvalidArgumentError):
        Matching(3, ((2, 1),))


def test_matching_counts():
    for n in range(1, 9):
        for k in range(n // 2 + 1):
            assert len(enumerate_matchings(n, k, "all")) == comb(n, 2 * k) * double_factorial(2 * k - 1)
            assert len(enumerate_matchings(n, k, "non_crossing_uncovered")) == dark_dimension(n, k)
    assert enumerate_matchings(3, 2) == []


def test_matching_examples():
    assert [str(m) for m in enumerate_matchings(4, 2, "all")] == ["(12)(34)", "(13)(24)", "(14)(23)"]
    restricted = enumerate_matchings(4, 2, "non_crossing_uncovered")
    assert [str(m) for m in restricted] == ["(12)(34)", "(14)(23)"]
    assert [str(m) for m in enumerate_matchings(4, 1, "non_crossing_uncovered")] == ["(12)", "(23)", "(34)"]
    for m in restricted:
        assert m.is_non_crossing_uncovered()
    assert not Matching(4, ((1, 3), (2, 4))).is_non_crossing_uncovered()
    assert not Matching(3, ((1, 3),)).is_non_crossing_uncovered()


def test_expansions_reproduce_eq_42():
    assert expand_matching(Matching(4, ((1, 3), (2, 4)))).terms() == S42_1
    assert expand_matching(Matching(4, ((1, 2), (3, 4)))).terms() == S42_2
    assert expand_matching(Matching(4, ((1, 4), (2, 3)))).terms() == S42_3


def test_expansion_shape():
    for n in range(2, 9):
        for k in range(1, n // 2 + 1):
            for m in enumerate_matchings(n, k, "all"):
                v = expand_matching(m)
                assert sorted(set(v.amps) - {0}) == [-1, 1] and len(v.support()) == 2**k
                assert is_dark(v)


def test_restricted_family_is_dark_basis():
    for n in range(2, 11):
        for k in range(1, n // 2 + 1):
            fam = enumerate_matchings(n, k, "non_crossing_uncovered")
            rows = [list(expand_matching(m).amps) for m in fam]
            assert exact.rank(exact.as_rows(rows), len(sector(n, k))) == dark_dimension(n, k)


def test_eq_42_decomposition_identity():
    v1, v2, v3 = (atomic_state(t) for t in (S42_1, S42_2, S42_3))
    assert (v1 - v2).equals(v3)
    dec = singlet_decompose(v3)
    assert [str(m) for m in dec.family] == ["(12)(34)", "(14)(23)"]
    assert dec.coefficients == (0, 1)
    dec = singlet_decompose(v1)
    assert dec.coefficients == (1, 1) and dec.residual == 0
    assert dec.reconstruct().equals(v1)


def test_decompose_d63_and_all_family():
    decs = decompose_many(dark_basis(6, 3).vectors)
    assert len(decs[0].family) == 5
    assert all(d.residual == 0 and d.reconstruct().equals(d.target) for d in decs)
    d = singlet_decompose(dark_basis(4, 2).vectors[0], restrict="all")
    assert d.residual == 0 and d.reconstruct().equals(d.target)


def test_decompose_rejects_non_dark():
    with pytest.raises(NotDarkError) as info:
        singlet_decompose(atomic_state({"01": 1, "10": 1}))
    assert info.value.residual > 0
    with pytest.raises(InvalidArgumentError):
        singlet_decompose(atomic_state({"11": 1, "00": -1}))
    with pytest.raises(InvalidArgumentError):
        singlet_decompose(atomic_state({"01": 1.0, "10": -1.0}, exact=False))


def _dense_projector(n, k, i, j):
    """Oracle: 1/2 sum_R |s_ij R><s_ij R| restricted to the sector."""
    codes = list(sector(n, k).codes)
    P = np.zeros((2**n, 2**n))
    others = [a for a in range(1, n + 1) if a not in (i, j)]
    for bits in range(2 ** len(others)):
        v = np.zeros(2**n)
        base = 0
        for pos, a in enumerate(others):
            if bits >> pos & 1:
                base |= 1 << (n - a)
        v[base | 1 << (n - j)] = 1
        v[base | 1 << (n - i)] = -1
        P += np.outer(v, v) / 2
    return P[np.ix_(codes, codes)]


def test_projector_and_antisymmetrizer_identities():
    for n in range(2, 7):
        for k in range(n + 1):
            for i, j in combinations(range(1, n + 1), 2):
                P = projector_matrix(n, k, i, j)
                An = antisymmetrizer_matrix(n, k, i, j)
                Pd = np.array(P.to_dense(), dtype=float)
                assert np.array_equal(Pd, _dense_projector(n, k, i, j))
                assert np.array_equal(np.array(An.to_dense(), dtype=float), 2 * Pd)
                assert np.array_equal(Pd @ Pd, Pd)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, n), st.lists(st.integers(-9, 9), min_size=20, max_size=20),
    st.sampled_from(list(combinations(range(1, n + 1), 2))))))
def test_projector_idempotent_on_random_vectors(args):
    n, k, vals, (i, j) = args
    sb = sector(n, k)
    v = StateVector(sb, tuple(F(vals[t % 20], 1 + t % 3) for t in range(len(sb))))
    p = singlet_project(v, i, j)
    assert singlet_project(p, i, j).equals(p)
    assert antisymmetrize(v, i, j).equals(2 * p)


def test_antisymmetrize_examples():
    assert antisymmetrize(atomic_state({"01": 1, "10": 1}), 1, 2).is_zero()
    s = atomic_state({"010": 1, "100": -1})
    assert antisymmetrize(s, 1, 2).equals(2 * s)
    assert singlet_project(s, 1, 2).equals(s)
    assert singlet_project(atomic_state({"011": 1, "101": 1}), 1, 2).is_zero()
    with pytest.raises(InvalidArgumentError):
        antisymmetrize(s, 2, 2)
    for v in dark_basis(5, 2).vectors:
        for i, j in combinations(range(1, 6), 2):
            assert is_dark(antisymmetrize(v, i, j))
    assert swap_atoms(swap_atoms(s, 1, 3), 1, 3).equals(s)


def test_pair_span_residual():
    for n in range(2, 7):
        for k in range(1, n // 2 + 1):
            for v in dark_basis(n, k).vectors:
                assert pair_span_residual_sq(v) == 0
    dicke = atomic_state({lab: 1 for lab in sector(4, 2).labels})
    assert pair_span_residual_sq(dicke) == 6
    assert pair_span_residual(dicke) == pytest.approx(6**0.5)
    with pytest.raises(InvalidArgumentError):
        pair_span_residual(atomic_state({"000": 1}))


def test_perfect_matching_overlaps_are_signed_powers_of_two():
    for k in range(1, 5):
        ms = enumerate_matchings(2 * k, k, "all")
        vs = [expand_matching(m) for m in ms]
        for a in vs:
            for b in vs:
                x = a.dot(b)
                assert x != 0
                ax = abs(int(x))
                assert ax & (ax - 1) == 0


def test_matching_span_closed_under_permutation():
    n, k = 5, 2
    fam = [list(expand_matching(m).amps) for m in enumerate_matchings(n, k, "non_crossing_uncovered")]
    for m in enumerate_matchings(n, k, "all"):
        v = list(expand_matching(m).amps)
        assert exact.rank(exact.as_rows(fam + [v]), len(sector(n, k))) == len(fam)
