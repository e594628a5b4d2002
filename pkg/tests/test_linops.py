import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from annulus_ops.errors import DimensionMismatch, InvalidMatrix, StallError
from annulus_ops.linops import (
    AnnulusParams,
    Subspace,
    as_matrix,
    complement,
    compress,
    direct_sum,
    eigenvalues,
    intersect,
    kernel,
    largest_reducing_within,
    preimage,
    reduction_residual,
    span,
)
from annulus_ops.models import haar_unitary

from conftest import JORDAN

E = np.eye(3)


def coord(n, *idx):
    return Subspace.coordinate(n, idx)


# ---------------------------------------------------------------- params


def test_params_defaults():
    p = AnnulusParams(0.5)
    assert (p.tol_rank, p.tol_id, p.tol_spec) == (1e-9, 1e-8, 1e-8)


@pytest.mark.parametrize("r", [0.0, 1.0, -0.2, 1.5])
def test_params_reject_bad_r(r):
    with pytest.raises(ValueError):
        AnnulusParams(r)


def test_params_reject_bad_tolerance():
    with pytest.raises(ValueError):
        AnnulusParams(0.5, tol_id=0.0)


def test_profile_from_env(monkeypatch):
    monkeypatch.setenv("ANNULUS_OPS_TOLERANCE_PROFILE", "strict")
    p = AnnulusParams.from_profile(0.5)
    assert p.tol_id == 1e-10
    # explicit overrides beat the profile
    assert AnnulusParams.from_profile(0.5, tol_id=1e-6).tol_id == 1e-6


def test_unknown_profile():
    with pytest.raises(ValueError, match="unknown tolerance profile"):
        AnnulusParams.from_profile(0.5, "loose")


# ---------------------------------------------------------------- inputs


def test_as_matrix_rejects_nan():
    with pytest.raises(InvalidMatrix):
        as_matrix([[np.nan, 0], [0, 1]])


def test_as_matrix_rejects_rectangular():
    with pytest.raises(InvalidMatrix):
        as_matrix(np.ones((2, 3)))


def test_subspace_rejects_non_orthonormal():
    with pytest.raises(InvalidMatrix):
        Subspace(np.array([[1.0], [1.0]]))


def test_subspace_basis_is_read_only():
    S = Subspace.full(2)
    with pytest.raises(ValueError):
        S.basis[0, 0] = 2


def test_empty_subspace_is_a_value():
    Z = Subspace.zero(4)
    assert Z.dim == 0 and Z.ambient_dim == 4
    assert np.allclose(Z.projector, 0)


# ---------------------------------------------------------------- kernel and friends


def test_kernel_of_zero_is_everything():
    assert kernel(np.zeros((3, 3))).dim == 3


def test_kernel_of_identity_is_zero():
    assert kernel(E).dim == 0


def test_kernel_small_singular_value():
    K = kernel(np.diag([1, 1e-15, 2]), tol_rank=1e-9)
    assert K.distance(coord(3, 1)) <= 1e-12


def test_kernel_absolute_floor():
    # relative cutoff alone keeps a direction of size 1e-12 when smax is tiny
    M = np.diag([1e-11, 1e-12])
    assert kernel(M).dim == 0
    assert kernel(M, atol=1e-8).dim == 2


def test_span_drops_dependent_columns():
    V = np.array([[1, 2], [0, 0], [1, 2]], dtype=float)
    assert span(V).dim == 1


def test_intersect_examples():
    A, B = coord(3, 0, 1), coord(3, 1, 2)
    assert intersect(A, B).distance(coord(3, 1)) <= 1e-12
    assert intersect(A, A).distance(A) <= 1e-12
    assert intersect(coord(3, 0), coord(3, 1)).dim == 0


def test_complement_examples():
    assert complement(Subspace.zero(3)).dim == 3
    assert complement(Subspace.full(3)).dim == 0
    v = np.array([[1], [1]]) / np.sqrt(2)
    w = Subspace(np.array([[1], [-1]]) / np.sqrt(2))
    assert complement(Subspace(v)).distance(w) <= 1e-12


def test_direct_sum():
    assert direct_sum(coord(3, 0), coord(3, 2)).distance(coord(3, 0, 2)) <= 1e-12
    assert direct_sum(Subspace.zero(3)).dim == 0


def test_mismatched_ambient_dims():
    with pytest.raises(DimensionMismatch):
        intersect(coord(2, 0), coord(3, 0))


def test_preimage_of_singular_operator():
    N = np.array([[0, 1], [0, 0]], dtype=float)
    # N e_1 = 0 and N e_2 = e_1, so N^-1(span e_1) is everything
    assert preimage(N, coord(2, 0)).dim == 2
    assert preimage(N, Subspace.zero(2)).distance(coord(2, 0)) <= 1e-12


def test_eigenvalues_examples():
    assert np.allclose(sorted(np.abs(eigenvalues(np.diag([1, 0.5j])))), [0.5, 1])
    assert np.allclose(eigenvalues(JORDAN), [0.7, 0.7])
    C4 = np.roll(np.eye(4), 1, axis=0)
    lam = eigenvalues(C4)
    assert np.allclose(lam**4, 1)
    assert len({np.round(z, 8) for z in lam}) == 4


def test_compress_and_residual():
    T = np.diag([1, 2, 3]).astype(complex)
    S = coord(3, 0, 2)
    assert np.allclose(compress(T, S), np.diag([1, 3]))
    assert reduction_residual(T, S) == 0.0
    assert reduction_residual(JORDAN, coord(2, 0)) == pytest.approx(0.1)


# ---------------------------------------------------------------- largest reducing subspace


def test_lrw_diagonal_keeps_everything():
    assert largest_reducing_within([np.diag([1, 0.7])], Subspace.full(2)).dim == 2


def test_lrw_jordan_kills_invariant_line():
    assert largest_reducing_within([np.array([[0.5, 1], [0, 0.5]])], coord(2, 0)).dim == 0


def test_lrw_common_eigenvector():
    C2 = np.array([[0, 1], [1, 0]], dtype=float)
    K = Subspace(np.array([[1], [1]]) / np.sqrt(2))
    assert largest_reducing_within([C2], K).distance(K) <= 1e-12


def test_lrw_stall_cap(monkeypatch):
    import annulus_ops.linops as L

    # a refinement that always claims to shrink but never moves the frame
    monkeypatch.setattr(L, "kernel", lambda M, tol_rank, atol=0.0: Subspace(np.eye(M.shape[1])[:, :-1]))
    monkeypatch.setattr(L, "_reorthonormalize", lambda B: np.eye(B.shape[0], dtype=complex))
    with pytest.raises(StallError):
        largest_reducing_within([np.eye(3)], Subspace.full(3))


# ---------------------------------------------------------------- properties

complex_mats = st.integers(2, 6).flatmap(
    lambda n: hnp.arrays(
        np.float64, (2, n, n), elements=st.floats(-2, 2, allow_nan=False, allow_infinity=False)
    ).map(lambda a: a[0] + 1j * a[1])
)


@settings(max_examples=60, deadline=None)
@given(complex_mats, st.integers(0, 3))
def test_kernel_vectors_are_annihilated(M, drop):
    # force some rank deficiency
    n = M.shape[0]
    drop = min(drop, n)
    u, s, vh = np.linalg.svd(M)
    s[n - drop:] = 0
    M = (u * s) @ vh
    K = kernel(M)
    smax = np.linalg.norm(M, 2)
    if K.dim:
        assert np.linalg.norm(M @ K.basis, 2) <= 10 * 1e-9 * max(smax, 1e-300)
    assert K.dim >= drop


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.data())
def test_intersection_properties(n, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    Q = haar_unitary(n, rng)
    ka = data.draw(st.integers(0, n))
    kb = data.draw(st.integers(0, n))
    A = Subspace(Q[:, :ka])
    B = Subspace(haar_unitary(n, rng)[:, :kb] if data.draw(st.booleans()) else Q[:, n - kb:])
    I1, I2 = intersect(A, B), intersect(B, A)
    assert I1.dim == I2.dim
    if I1.dim:
        assert I1.distance(I2) <= 1e-8
        assert np.linalg.norm(I1.projector - I1.projector @ A.projector) <= 1e-8
    assert I1.dim >= ka + kb - n
    assert A.dim + complement(A).dim == n


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_lrw_properties(n, seed):
    rng = np.random.default_rng(seed)
    # operator with a planted reducing block of size k
    k = int(rng.integers(1, n))
    Q = haar_unitary(n, rng)
    A = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    B = rng.standard_normal((n - k, n - k)) + 1j * rng.standard_normal((n - k, n - k))
    T = Q @ np.block([[A, np.zeros((k, n - k))], [np.zeros((n - k, k)), B]]) @ Q.conj().T
    small = Subspace(Q[:, :k])
    big = direct_sum(small, Subspace(haar_unitary(n, rng)[:, :1]))
    M_small = largest_reducing_within([T], small)
    M_big = largest_reducing_within([T], big)
    for M, K in ((M_small, small), (M_big, big)):
        assert K.contains(M)
        assert reduction_residual(T, M) <= 1e-8
    assert M_big.dim >= M_small.dim
    assert largest_reducing_within([T], small).dim == M_small.dim
