import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from annulus_ops.brehmer import (
    MAX_K,
    check_bp_identity,
    check_brehmer,
    delta_mk,
    single_binomial_residual,
    subsets,
    szego_operator,
)
from annulus_ops.errors import BadMultiIndex, DimensionMismatch, NotArIsometry
from annulus_ops.linops import AnnulusParams, opnorm
from annulus_ops.models import haar_unitary, random_ar_unitary


def commuting_unitaries(n_ops, dim, r, rng):
    """Commuting annulus unitaries sharing one Haar diagonalization."""
    Q = haar_unitary(dim, rng)
    ops = []
    for _ in range(n_ops):
        radii = np.where(rng.random(dim) < 0.5, 1.0, r)
        ops.append(Q @ np.diag(radii * np.exp(2j * np.pi * rng.random(dim))) @ Q.conj().T)
    return ops


def test_szego_single():
    assert np.allclose(szego_operator([np.diag([1, 0.5])], (0,)), np.diag([0, 0.75]))
    assert np.allclose(szego_operator([haar_unitary(3, 1)], (0,)), 0, atol=1e-14)


def test_szego_pair_factorizes():
    a, b = np.array([0.3, 0.9, 1.0]), np.array([0.6, 0.2, 0.5])
    S = szego_operator([np.diag(a), np.diag(b)], (0, 1))
    assert np.allclose(S, np.diag((1 - a**2) * (1 - b**2)))


def test_delta_k1_is_defect():
    V = random_ar_unitary(2, 2, 0.5, 3)
    assert np.allclose(delta_mk([V], (0,), [1]), np.eye(4) - V.conj().T @ V)


def test_delta_k3_single_identity():
    V = random_ar_unitary(2, 2, 0.5, 3)
    want = 0.5625 * (np.eye(4) - V.conj().T @ V)
    assert opnorm(delta_mk([V], (0,), [3]) - want) <= 1e-12


def test_delta_all_ones_equals_szego():
    rng = np.random.default_rng(1)
    ops = [np.diag(rng.uniform(0.2, 1, 4)) for _ in range(3)]
    for u in subsets(3):
        assert opnorm(delta_mk(ops, u, [1] * len(u)) - szego_operator(ops, u)) <= 1e-12


def test_bad_multi_index():
    V = np.eye(2)
    with pytest.raises(BadMultiIndex):
        delta_mk([V], (0,), [0])
    with pytest.raises(BadMultiIndex):
        delta_mk([V], (0,), [MAX_K + 1])
    with pytest.raises(BadMultiIndex):
        delta_mk([V, V], (0, 1), [1])
    with pytest.raises(BadMultiIndex):
        szego_operator([V], (1,))
    with pytest.raises(BadMultiIndex):
        szego_operator([V], ())


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        szego_operator([np.eye(2), np.eye(3)], (0, 1))


def test_subset_order():
    assert subsets(3) == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]


def test_check_brehmer_examples(p):
    rep = check_brehmer([np.diag([0.5, 1]), np.diag([1, 0.5])], p)
    assert rep.passed
    assert rep.min_eigenvalues[(0, 1)] == pytest.approx(0.0, abs=1e-15)
    bad = check_brehmer([np.diag([1.2])], p)
    assert not bad.passed and bad.failures == [(0,)]


def test_check_brehmer_commuting_unitaries(p):
    rng = np.random.default_rng(4)
    assert check_brehmer(commuting_unitaries(3, 5, 0.5, rng), p).passed


def test_bp_identity_examples(p):
    V = random_ar_unitary(3, 2, 0.5, 6)
    assert check_bp_identity([V], (0,), [2], p) <= 1e-10
    assert check_bp_identity([V], (0,), [1], p) == 0.0
    D1 = np.diag([1, 0.5, 0.5j, -1])
    D2 = np.diag([0.5, 0.5, 1j, 1])
    assert check_bp_identity([D1, D2], (0, 1), [2, 3], p) <= 1e-10


def test_bp_identity_rejects(p):
    with pytest.raises(NotArIsometry):
        check_bp_identity([np.diag([0.7, 1])], (0,), [2], p)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.sampled_from([0.3, 0.5, 0.9]), st.integers(0, 2**32 - 1))
def test_single_identity_property(k, r, seed):
    rng = np.random.default_rng(seed)
    n_u = int(rng.integers(0, 5))
    V = random_ar_unitary(n_u, 5 - n_u, r, rng)
    assert single_binomial_residual(V, k, r) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_brehmer_positivity_property(n_ops, seed):
    rng = np.random.default_rng(seed)
    p = AnnulusParams(0.5)
    ops = commuting_unitaries(n_ops, 4, 0.5, rng)
    rep = check_brehmer(ops, p)
    assert rep.passed
    assert list(rep.min_eigenvalues) == subsets(n_ops)
    for u in subsets(n_ops):
        S = szego_operator(ops, u)
        assert opnorm(S - S.conj().T) <= 1e-12
        for k in itertools.product((1, 2), repeat=len(u)):
            assert check_bp_identity(ops, u, k, p) <= 1e-9
