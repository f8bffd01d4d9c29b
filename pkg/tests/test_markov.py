import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mixlab.exceptions import DomainError
from mixlab.markov import (
    M1,
    M2,
    block_structure_ok,
    bowen_franks,
    build_AN,
    is_aperiodic,
    is_irreducible,
    k_theory,
    spectral_radius,
)

import oracles


def reference_AN(N):
    """Entry (k, t), (l, s) is 1 iff (0, 1; 1, l) sends s to t on P^1(F_2)."""
    A = np.zeros((3 * N, 3 * N), dtype=int)
    for k in range(N):
        for l in range(1, N + 1):
            for s in range(3):
                t = oracles.p1_act(((0, 1), (1, l)), s)
                A[3 * k + t, 3 * (l - 1) + s] = 1
    return A


@pytest.mark.parametrize("N", [1, 2, 3, 7])
def test_matches_reference(N):
    m = build_AN(N)
    assert np.array_equal(m.A, reference_AN(N))
    assert block_structure_ok(m) and block_structure_ok(m.transpose())
    assert np.array_equal(build_AN(N, "transpose").A, m.A.T)


def test_blocks_are_permutations():
    for B in (M1, M2):
        assert np.array_equal(B.sum(axis=0), [1, 1, 1]) and np.array_equal(B.sum(axis=1), [1, 1, 1])
    assert np.array_equal(np.linalg.matrix_power(M2, 3), np.eye(3))
    assert np.array_equal(M1 @ M1, np.eye(3))


@pytest.mark.parametrize("N", range(2, 17))
def test_graph_properties(N):
    m = build_AN(N)
    assert is_irreducible(m) and oracles.nx_strongly_connected(m.A)
    assert is_aperiodic(m) and oracles.nx_aperiodic(m.A)
    assert spectral_radius(m) == N
    assert spectral_radius(m.transpose(), check=False) == pytest.approx(N, rel=1e-10)
    assert max(abs(oracles.dense_spectrum(m.A))) == pytest.approx(N)


def test_single_digit_is_a_cycle():
    # one odd digit leaves only the 3-cycle M2 on the sheets
    m = build_AN(1)
    assert is_irreducible(m) and is_aperiodic(m).period == 3


def test_all_M1_variant_is_reducible():
    A = np.tile(M1, (2, 2))
    c = is_irreducible(A)
    assert not c and not oracles.nx_strongly_connected(A)
    assert c.witness["unreachable_from_root"]
    with pytest.raises(DomainError):
        is_aperiodic(A)


def test_periods():
    assert is_aperiodic(np.array([[0, 1], [1, 0]])).period == 2
    assert is_aperiodic(np.array([[1]])).aperiodic
    assert not is_irreducible(np.zeros((2, 2), dtype=int))


@given(st.integers(2, 6).flatmap(lambda n: arrays(np.int64, (n, n), elements=st.integers(0, 1))))
@settings(max_examples=150, deadline=None)
def test_graph_checks_match_networkx(A):
    irr = bool(is_irreducible(A))
    assert irr == oracles.nx_strongly_connected(A)
    if irr:
        assert bool(is_aperiodic(A)) == oracles.nx_aperiodic(A)


@pytest.mark.parametrize("N", range(2, 9))
def test_bowen_franks(N):
    m = build_AN(N)
    bf = bowen_franks(m)
    bft = bowen_franks(m.transpose())
    assert bf.divisors == bft.divisors and bf.free_rank == bft.free_rank
    I = np.eye(3 * N, dtype=int)
    assert bf.divisors + [0] * bf.free_rank == oracles.sympy_snf(I - m.A)
    det = oracles.sympy_det(I - m.A)
    assert bf.det == det
    if det:
        assert np.prod(bf.divisors, dtype=object) == abs(det)
    else:
        assert bf.free_rank > 0
    K = k_theory(m)
    assert K.K1_rank == K.K0_free_rank == bft.free_rank


def test_bf_two():
    bf = bowen_franks(build_AN(2))
    assert bf.group() == "Z/2" and abs(bf.det) == 2
    assert bf.to_json()["group"] == "Z/2"


def test_identity_and_zero():
    bf = bowen_franks(np.eye(3, dtype=int))
    assert bf.free_rank == 3 and bf.det == 0 and bf.group() == "Z + Z + Z"
    assert bowen_franks(np.zeros((2, 2), dtype=int)).group() == "0"


def test_serialization():
    m = build_AN(2)
    assert m.edge_list().count("\n") == m.A.sum() == 12
    assert m.to_json()["convention"] == "lemma"
    with pytest.raises(DomainError):
        build_AN(2, "columns")
