"""Concrete operators on the annulus: diagonal and cyclic annulus unitaries,
the truncated weighted shift on the Hardy-type space H^2_alpha, the commuting
pair (S, S^2) built from it, and planted block constructions.

The shift lives on an index window ``n_min..n_max`` with orthonormal basis
``e_n = w_n / ||w_n||`` where ``||w_n||^2 = c_n = 1 + r^(2(alpha + n))``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import EigenvalueOffBoundary, InconsistentBlocks, WindowTooSmall
from .linops import AnnulusParams, Subspace, as_matrix

__all__ = [
    "HardyModelSpec",
    "PlantedSpec",
    "haar_unitary",
    "gen_ar_unitary",
    "gen_cyclic_annulus_unitary",
    "hardy_norms",
    "gen_hardy_shift",
    "r_alpha",
    "gen_sarason_pair",
    "sarason_w_coefficient",
    "gen_planted",
    "random_ar_unitary",
    "random_cnu",
]


@dataclass(frozen=True)
class HardyModelSpec:
    alpha: float
    r: float
    n_min: int
    n_max: int

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {self.r!r}")
        if self.n_max - self.n_min + 1 < 3:
            raise WindowTooSmall(f"window [{self.n_min}, {self.n_max}] has fewer than 3 indices")

    @property
    def indices(self):
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def size(self):
        return self.n_max - self.n_min + 1


@dataclass(frozen=True)
class PlantedSpec:
    """Blocks of a planted tuple.

    ``blocks`` is a list of ``(matrices, labels)``: one square matrix per
    tuple component (a bare matrix is accepted for single operators) and
    the expected label of the block, one per component.
    """

    blocks: list
    seed: int = 0


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(n, seed=0):
    """Haar-distributed n x n unitary (QR of a Ginibre sample, phases fixed)."""
    rng = _rng(seed)
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def gen_ar_unitary(eigs_unit, eigs_r, p, conjugate_seed=None):
    """Diagonal annulus unitary with eigenvalues on the unit circle and on ``|z| = r``.

    With ``conjugate_seed`` the diagonal is conjugated by a Haar unitary.
    """
    eu = np.asarray(eigs_unit, dtype=complex).ravel()
    er = np.asarray(eigs_r, dtype=complex).ravel()
    if np.any(np.abs(np.abs(eu) - 1.0) > p.tol_spec):
        raise EigenvalueOffBoundary("eigs_unit must have modulus 1")
    if np.any(np.abs(np.abs(er) - p.r) > p.tol_spec):
        raise EigenvalueOffBoundary(f"eigs_r must have modulus r = {p.r}")
    d = np.concatenate([eu, er])
    if d.size == 0:
        raise ValueError("need at least one eigenvalue")
    T = np.diag(d)
    if conjugate_seed is not None:
        Q = haar_unitary(d.size, conjugate_seed)
        T = Q @ T @ Q.conj().T
    return T


def _cyclic_shift(k):
    return np.roll(np.eye(k, dtype=complex), 1, axis=0)


def gen_cyclic_annulus_unitary(N, M, p):
    """``C_N ⊕ r C_M`` with ``C_k`` the k x k cyclic shift ``e_j -> e_(j+1 mod k)``."""
    if N < 1 or M < 1:
        raise ValueError("N and M must be positive")
    return block_diag(_cyclic_shift(N), p.r * _cyclic_shift(M))


def hardy_norms(alpha, r, indices):
    """``c_n = ||w_n||^2 = 1 + r^(2(alpha + n))``."""
    n = np.asarray(indices, dtype=float)
    return 1.0 + r ** (2.0 * (alpha + n))


def gen_hardy_shift(spec, closed=False):
    """Matrix of the shift ``w_n -> w_(n+1)`` in the orthonormal basis of the window.

    Returns ``(V, c)`` with ``c[j] = c_(n_min + j)``. ``V e_n = a_n e_(n+1)``
    with ``a_n = sqrt(c_(n+1) / c_n)`` and ``V e_(n_max) = 0``. With
    ``closed=True`` the last basis vector is sent to ``a_(n_max) e_(n_min)``
    instead, which makes ``V`` invertible with singular values in ``(r, 1)``.
    """
    idx = spec.indices
    c = hardy_norms(spec.alpha, spec.r, idx)
    c_next = hardy_norms(spec.alpha, spec.r, idx + 1)
    a = np.sqrt(c_next / c)
    m = spec.size
    V = np.zeros((m, m), dtype=complex)
    V[np.arange(1, m), np.arange(m - 1)] = a[:-1]
    if closed:
        V[0, m - 1] = a[-1]
    return V, c


def r_alpha(alpha, n, r):
    """Coefficient of the adjoint shift: ``S^H w_n = r(alpha; n) w_(n-1)``."""
    return (1.0 + r ** (2.0 * (alpha + n))) / (1.0 + r ** (2.0 * (alpha + n - 1)))


def gen_sarason_pair(spec, closed=False):
    """The commuting pair ``(V, V^2)`` and the annulus parameter ``r^2`` it lives on."""
    if spec.size < 5:
        raise WindowTooSmall(f"window [{spec.n_min}, {spec.n_max}] has fewer than 5 indices")
    V1, _ = gen_hardy_shift(spec, closed=closed)
    return V1, V1 @ V1, spec.r ** 2


def sarason_w_coefficient(spec, n=0):
    """Coefficient of ``w_(n-1)`` in ``(V1 V2^H - V2^H V1) w_n``, read off the matrices.

    Needs ``n - 2`` and ``n + 1`` inside the window so truncation does not
    touch the computation.
    """
    if not (spec.n_min <= n - 2 and n + 1 <= spec.n_max):
        raise WindowTooSmall(f"index {n} needs the window to cover [{n - 2}, {n + 1}]")
    V1, V2, _ = gen_sarason_pair(spec)
    _, c = gen_hardy_shift(spec)
    D = V1 @ V2.conj().T - V2.conj().T @ V1
    j = n - spec.n_min
    # D w_n = sqrt(c_n) D e_n; divide the e_(n-1) entry by ||w_(n-1)||
    return float(np.real(D[j - 1, j]) * np.sqrt(c[j]) / np.sqrt(c[j - 1]))


def gen_planted(spec):
    """Direct-sum the blocks per component and conjugate by one Haar unitary.

    Returns ``(ops, expected)`` where ``expected`` maps each label tuple to
    the image of its blocks' coordinates.
    """
    if not spec.blocks:
        raise InconsistentBlocks("need at least one block")
    normalized = []
    n_ops = None
    for mats, labels in spec.blocks:
        if isinstance(mats, np.ndarray) and mats.ndim == 2:
            mats = [mats]
        mats = [as_matrix(M) for M in mats]
        labels = (labels,) if isinstance(labels, str) else tuple(labels)
        if n_ops is None:
            n_ops = len(mats)
        if len(mats) != n_ops or len(labels) != n_ops:
            raise InconsistentBlocks("every block needs one matrix and one label per component")
        if len({M.shape[0] for M in mats}) != 1:
            raise InconsistentBlocks("component matrices of a block differ in dimension")
        normalized.append((mats, labels))

    dim = sum(mats[0].shape[0] for mats, _ in normalized)
    Q = haar_unitary(dim, spec.seed)
    ops = [block_diag(*(mats[i] for mats, _ in normalized)) for i in range(n_ops)]
    coords = {}
    offset = 0
    for mats, labels in normalized:
        k = mats[0].shape[0]
        coords.setdefault(labels, []).extend(range(offset, offset + k))
        offset += k
    ops = [Q @ T @ Q.conj().T for T in ops]
    expected = {
        labels: Subspace.coordinate(dim, idx).transform(Q) for labels, idx in coords.items()
    }
    return ops, expected


def random_ar_unitary(n_u, n_r, r, seed=0, conjugate=True):
    """Random annulus unitary with ``n_u`` unimodular and ``n_r`` modulus-``r`` eigenvalues."""
    rng = _rng(seed)
    eu = np.exp(2j * np.pi * rng.random(n_u))
    er = r * np.exp(2j * np.pi * rng.random(n_r))
    p = AnnulusParams(r)
    return gen_ar_unitary(eu, er, p, conjugate_seed=rng if conjugate else None)


def random_cnu(n, r, seed=0):
    """Random c.n.u. candidate ``W diag(s) X`` with singular values strictly inside ``(r, 1)``.

    Every singular value lies in ``[r + 0.1(1 - r), 1 - 0.1(1 - r)]``, so
    eigenvalue moduli do too and neither ``T`` nor ``r T^-1`` has an
    isometric direction.
    """
    rng = _rng(seed)
    lo, hi = r + 0.1 * (1 - r), 1 - 0.1 * (1 - r)
    s = rng.uniform(lo, hi, n)
    return haar_unitary(n, rng) @ np.diag(s) @ haar_unitary(n, rng)

