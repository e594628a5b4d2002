"""Dense complex matrix and subspace algebra.

Subspaces are carried as orthonormal column frames. All rank decisions go
through :func:`kernel`, which uses an SVD with the cutoff
``max(atol, tol_rank * smax)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidMatrix,
    NumericalFailure,
    StallError,
)

__all__ = [
    "AnnulusParams",
    "Subspace",
    "as_matrix",
    "opnorm",
    "kernel",
    "span",
    "intersect",
    "complement",
    "direct_sum",
    "preimage",
    "eigenvalues",
    "compress",
    "reduction_residual",
    "largest_reducing_within",
]

TOLERANCE_PROFILE_ENV = "ANNULUS_OPS_TOLERANCE_PROFILE"

_PROFILES = {
    "default": {"tol_rank": 1e-9, "tol_id": 1e-8, "tol_spec": 1e-8},
    "strict": {"tol_rank": 1e-11, "tol_id": 1e-10, "tol_spec": 1e-10},
}


@dataclass(frozen=True)
class AnnulusParams:
    """Annulus modulus ``r`` together with the numerical tolerances.

    ``tol_rank`` is the relative singular-value cutoff for kernels,
    ``tol_id`` the operator-norm slack for identities and ``tol_spec`` the
    slack for spectral membership tests.
    """

    r: float
    tol_rank: float = 1e-9
    tol_id: float = 1e-8
    tol_spec: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {self.r!r}")
        for name in ("tol_rank", "tol_id", "tol_spec"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value!r}")

    @classmethod
    def from_profile(cls, r, profile=None, **overrides):
        """Build parameters from a named tolerance profile.

        ``profile`` defaults to the ``ANNULUS_OPS_TOLERANCE_PROFILE``
        environment variable, then to ``"default"``. Keyword overrides that
        are not ``None`` take precedence over the profile.
        """
        if profile is None:
            profile = os.environ.get(TOLERANCE_PROFILE_ENV) or "default"
        try:
            tols = dict(_PROFILES[profile])
        except KeyError:
            raise ValueError(
                f"unknown tolerance profile {profile!r}; expected one of {sorted(_PROFILES)}"
            ) from None
        tols.update({k: v for k, v in overrides.items() if v is not None})
        return cls(r=r, **tols)

    def with_r(self, r):
        return AnnulusParams(r, self.tol_rank, self.tol_id, self.tol_spec)


def as_matrix(M, *, square=True):
    """Return ``M`` as a finite complex 2-D array, raising InvalidMatrix otherwise."""
    try:
        A = np.asarray(M, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f"cannot convert to a complex matrix: {exc}") from None
    if A.ndim != 2:
        raise InvalidMatrix(f"expected a 2-D array, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise InvalidMatrix("matrix has non-finite entries")
    return A


def opnorm(M):
    """Spectral norm; 0 for empty arrays."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of C^n given by an orthonormal frame ``basis`` (n x k).

    ``residual`` records ``||basis^H basis - I||`` at construction time.
    """

    basis: np.ndarray
    residual: float = field(default=0.0)

    TOL_ORTH = 1e-12

    def __post_init__(self):
        B = np.array(self.basis, dtype=complex, copy=True)
        if B.ndim != 2:
            raise InvalidMatrix(f"basis must be 2-D, got shape {B.shape}")
        n, k = B.shape
        if n < 1 or k > n:
            raise InvalidMatrix(f"invalid frame shape {B.shape}")
        res = opnorm(B.conj().T @ B - np.eye(k)) if k else 0.0
        if res > self.TOL_ORTH * max(1, k) * 10:
            raise InvalidMatrix(f"basis columns are not orthonormal (residual {res:.3e})")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)
        object.__setattr__(self, "residual", float(res))

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, 0), dtype=complex))

    @classmethod
    def full(cls, n):
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def coordinate(cls, n, indices):
        """Span of the standard basis vectors with the given (0-based) indices."""
        return cls(np.eye(n, dtype=complex)[:, list(indices)])

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    @property
    def projector(self):
        return self.basis @ self.basis.conj().T

    def distance(self, other):
        """Frobenius distance between the orthogonal projectors."""
        _check_same_ambient(self, other)
        return float(np.linalg.norm(self.projector - other.projector, "fro"))

    def contains(self, other, tol=1e-8):
        """True if ``other`` lies inside this subspace up to ``tol``."""
        _check_same_ambient(self, other)
        if other.dim == 0:
            return True
        leak = other.basis - self.basis @ (self.basis.conj().T @ other.basis)
        return opnorm(leak) <= tol

    def transform(self, Q):
        """Image under a unitary ``Q``."""
        Q = as_matrix(Q)
        if Q.shape[0] != self.ambient_dim:
            raise DimensionMismatch("unitary and subspace dimensions differ")
        return Subspace(_reorthonormalize(Q @ self.basis))


def _check_same_ambient(*spaces):
    dims = {s.ambient_dim for s in spaces}
    if len(dims) > 1:
        raise DimensionMismatch(f"subspaces live in different ambient spaces: {sorted(dims)}")


def _reorthonormalize(B):
    """QR-clean a frame that is already orthonormal up to rounding."""
    if B.shape[1] == 0:
        return B
    Q, R = np.linalg.qr(B)
    # keep the orientation of the input columns
    phases = np.diag(R).copy()
    phases[phases == 0] = 1
    return Q * (phases / np.abs(phases))


def _svd(M, full_matrices=True):
    try:
        return np.linalg.svd(M, full_matrices=full_matrices)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge: {exc}") from None


def kernel(M, tol_rank=1e-9, atol=0.0):
    """Orthonormal basis of the numerical null space of ``M``.

    Right singular vectors whose singular values are at most
    ``max(atol, tol_rank * smax)`` span the result. ``M`` may be
    rectangular; the result lives in C^(number of columns). A zero matrix
    has the whole space as kernel.
    """
    M = as_matrix(M, square=False)
    n = M.shape[1]
    if M.shape[0] == 0:
        return Subspace.full(n)
    _, s, vh = _svd(M)
    smax = s[0] if s.size else 0.0
    tol = max(atol, tol_rank * smax)
    rank = int(np.count_nonzero(s > tol))
    return Subspace(_reorthonormalize(vh[rank:].conj().T))


def span(vectors, n=None, tol_rank=1e-9, atol=0.0):
    """Orthonormal basis of the column span of ``vectors`` (n x m).

    Left singular vectors with singular value above
    ``max(atol, tol_rank * smax)`` are kept.
    """
    V = as_matrix(vectors, square=False)
    if n is None:
        n = V.shape[0]
    if V.shape[1] == 0:
        return Subspace.zero(n)
    u, s, _ = _svd(V, full_matrices=False)
    smax = s[0] if s.size else 0.0
    rank = int(np.count_nonzero(s > max(atol, tol_rank * smax))) if smax > 0 else 0
    return Subspace(_reorthonormalize(u[:, :rank]))


def intersect(A, B, tol_rank=1e-9):
    """Intersection of two subspaces.

    Computed as the kernel of the stacked complementary projectors
    ``[I - P_A; I - P_B]``, with ``tol_rank`` also used as an absolute floor
    (the stack has norm at most sqrt(2)).
    """
    _check_same_ambient(A, B)
    n = A.ambient_dim
    if A.dim == 0 or B.dim == 0:
        return Subspace.zero(n)
    eye = np.eye(n)
    stacked = np.vstack([eye - A.projector, eye - B.projector])
    return kernel(stacked, tol_rank, atol=tol_rank)


def complement(A):
    """Orthogonal complement; its dimension is exactly ``n - dim A``."""
    n, k = A.ambient_dim, A.dim
    if k == 0:
        return Subspace.full(n)
    if k == n:
        return Subspace.zero(n)
    Q, _ = np.linalg.qr(A.basis, mode="complete")
    return Subspace(_reorthonormalize(Q[:, k:]))


def direct_sum(*spaces, tol_rank=1e-9):
    """Span of the union of the given subspaces."""
    if not spaces:
        raise ValueError("need at least one subspace")
    _check_same_ambient(*spaces)
    n = spaces[0].ambient_dim
    frames = [s.basis for s in spaces if s.dim]
    if not frames:
        return Subspace.zero(n)
    return span(np.hstack(frames), n, tol_rank)


def preimage(T, K, tol_rank=1e-9):
    """``{x : T x in K}`` as ``kernel((I - P_K) T)``; never inverts ``T``."""
    T = as_matrix(T)
    if T.shape[0] != K.ambient_dim:
        raise DimensionMismatch("operator and subspace dimensions differ")
    n = T.shape[0]
    M = (np.eye(n) - K.projector) @ T
    return kernel(M, tol_rank, atol=tol_rank * opnorm(T))


def eigenvalues(M):
    """All eigenvalues of ``M`` with multiplicity (unordered)."""
    M = as_matrix(M)
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from None


def compress(T, S):
    """Matrix of ``P_S T|_S`` in the frame of ``S``."""
    T = as_matrix(T)
    if T.shape[0] != S.ambient_dim:
        raise DimensionMismatch("operator and subspace dimensions differ")
    B = S.basis
    return B.conj().T @ T @ B


def reduction_residual(T, S):
    """``max(||P_perp T P||, ||P_perp T^H P||)``; zero iff ``S`` reduces ``T``."""
    T = as_matrix(T)
    if T.shape[0] != S.ambient_dim:
        raise DimensionMismatch("operator and subspace dimensions differ")
    if S.dim == 0 or S.dim == S.ambient_dim:
        return 0.0
    B = S.basis
    P = np.eye(S.ambient_dim) - S.projector
    return max(opnorm(P @ T @ B), opnorm(P @ T.conj().T @ B))


def largest_reducing_within(ops, K, tol_rank=1e-9):
    """Largest subspace of ``K`` that reduces every operator in ``ops``.

    Iterates ``K <- K ∩ T^-1(K) ∩ (T^H)^-1(K)`` over all operators until the
    dimension stops changing. Each step is a single kernel computation in the
    frame of the current ``K``.
    """
    mats = [as_matrix(T) for T in ops]
    n = K.ambient_dim
    for T in mats:
        if T.shape[0] != n:
            raise DimensionMismatch("operator and subspace dimensions differ")
    scale = max((opnorm(T) for T in mats), default=0.0)
    current = K
    eye = np.eye(n)
    for _ in range(n + 2):
        if current.dim == 0 or not mats:
            return current
        B = current.basis
        P = eye - current.projector
        blocks = []
        for T in mats:
            blocks.append(P @ T @ B)
            blocks.append(P @ T.conj().T @ B)
        Y = kernel(np.vstack(blocks), tol_rank, atol=tol_rank * scale)
        if Y.dim == current.dim:
            return current
        current = Subspace(_reorthonormalize(B @ Y.basis))
    raise StallError(f"refinement did not stabilize within {n + 2} iterations")
