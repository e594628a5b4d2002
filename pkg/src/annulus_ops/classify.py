"""Tolerance-aware predicates for operators relative to the annulus r < |z| < 1."""

from __future__ import annotations

import enum

import numpy as np

from .errors import MixedType, NotACandidate, NotArUnitary, SingularOperator
from .linops import as_matrix, eigenvalues, opnorm

__all__ = [
    "AtomLabel",
    "UnitaryTypeLabel",
    "CnuLabel",
    "is_contraction",
    "is_normal",
    "is_invertible",
    "ar_unitary_defect",
    "ar_isometry_defect",
    "is_ar_unitary",
    "is_ar_isometry",
    "is_ar_contraction_candidate",
    "classify_atom",
    "classify_unitary_type",
    "classify_cnu",
]


class AtomLabel(str, enum.Enum):
    T_U = "t_u"
    T_C = "t_c"
    NON_ATOM = "non_atom"


class UnitaryTypeLabel(str, enum.Enum):
    U = "u"
    R = "r"


class CnuLabel(str, enum.Enum):
    T_P = "t_p"
    T_CNI = "t_cni"
    NON_FUNDAMENTAL = "non_fundamental"


def _singular_values(T):
    return np.linalg.svd(T, compute_uv=False)


def is_contraction(T, tol_id=1e-8):
    T = as_matrix(T)
    return bool(opnorm(T) <= 1.0 + tol_id)


def is_normal(T, tol_id=1e-8):
    """``||T^H T - T T^H|| <= tol_id * ||T||^2``."""
    T = as_matrix(T)
    H = T.conj().T
    return bool(opnorm(H @ T - T @ H) <= tol_id * opnorm(T) ** 2)


def is_invertible(T, tol_rank=1e-9):
    """``smin > tol_rank * smax``, the same rank notion used by kernels."""
    s = _singular_values(as_matrix(T))
    return bool(s[0] > 0 and s[-1] > tol_rank * s[0])


def ar_unitary_defect(T, r):
    """Norm of ``(I - T^H T)(T^H T - r^2 I)``."""
    T = as_matrix(T)
    n = T.shape[0]
    G = T.conj().T @ T
    eye = np.eye(n)
    return opnorm((eye - G) @ (G - r * r * eye))


def ar_isometry_defect(V, r):
    """Norm of ``-V^H^2 V^2 + (1 + r^2) V^H V - r^2 I``."""
    V = as_matrix(V)
    return opnorm(_isometry_form(V, r))


def _isometry_form(V, r):
    H = V.conj().T
    V2 = V @ V
    return -(H @ H @ V2) + (1 + r * r) * (H @ V) - r * r * np.eye(V.shape[0])


def is_ar_unitary(T, p):
    T = as_matrix(T)
    return is_normal(T, p.tol_id) and bool(ar_unitary_defect(T, p.r) <= p.tol_id)


def is_ar_isometry(V, p):
    """Invertible ``V`` satisfying the annulus-isometry operator identity.

    Raises SingularOperator when ``V`` is not invertible to ``p.tol_rank``.
    """
    V = as_matrix(V)
    if not is_invertible(V, p.tol_rank):
        raise SingularOperator("annulus-isometry test requires an invertible operator")
    return bool(ar_isometry_defect(V, p.r) <= p.tol_id)


def is_ar_contraction_candidate(T, p):
    """Necessary conditions for the closed annulus to be a spectral set of ``T``.

    Checks that every eigenvalue modulus lies in ``[r, 1]`` (slack
    ``tol_spec``) and that all singular values lie in ``[r, 1]`` (slack
    ``tol_id``); the latter says both ``T`` and ``r T^-1`` are contractions.
    Passing does not certify the spectral-set property.
    """
    T = as_matrix(T)
    moduli = np.abs(eigenvalues(T))
    if np.any(moduli < p.r - p.tol_spec) or np.any(moduli > 1.0 + p.tol_spec):
        return False
    s = _singular_values(T)
    return bool(s[0] <= 1.0 + p.tol_id and s[-1] >= p.r - p.tol_id)


def classify_atom(T, p):
    """Atom type of a candidate: ``t_u``, ``t_c`` or ``non_atom``.

    ``t_c`` means the canonical split finds no annulus-unitary part.
    """
    from .decompose import canonical_ar_contraction

    T = as_matrix(T)
    if not is_ar_contraction_candidate(T, p):
        raise NotACandidate("operator fails the annulus-contraction candidate test")
    if is_ar_unitary(T, p):
        return AtomLabel.T_U
    split = canonical_ar_contraction(T, p)
    if split["u"].dim + split["r"].dim == 0:
        return AtomLabel.T_C
    return AtomLabel.NON_ATOM


def classify_unitary_type(U, p):
    U = as_matrix(U)
    if not is_ar_unitary(U, p):
        raise NotArUnitary("operator is not an annulus unitary")
    G = U.conj().T @ U
    eye = np.eye(U.shape[0])
    if opnorm(G - eye) <= p.tol_id:
        return UnitaryTypeLabel.U
    if opnorm(G - p.r * p.r * eye) <= p.tol_id:
        return UnitaryTypeLabel.R
    raise MixedType("operator has both unitary and r-times-unitary parts; split it first")


def classify_cnu(T, p):
    """Levan type of a c.n.u. candidate.

    In finite dimensions this is always ``t_cni`` for nonzero spaces since
    pure annulus isometries need the whole closed annulus as spectrum.
    """
    from .decompose import levan_split

    split = levan_split(T, p)
    if split["cni"].dim == 0:
        return CnuLabel.T_P
    if split["iso"].dim == 0:
        return CnuLabel.T_CNI
    return CnuLabel.NON_FUNDAMENTAL
