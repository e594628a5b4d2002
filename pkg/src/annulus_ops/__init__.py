"""Finite-dimensional operator theory on the annulus r < |z| < 1.

Predicates, orthogonal decompositions of single operators and of commuting
tuples, Brehmer positivity checks and concrete model operators.
"""

from .brehmer import check_bp_identity, check_brehmer, delta_mk, single_binomial_residual, szego_operator
from .classify import (
    AtomLabel,
    CnuLabel,
    UnitaryTypeLabel,
    classify_atom,
    classify_cnu,
    classify_unitary_type,
    is_ar_contraction_candidate,
    is_ar_isometry,
    is_ar_unitary,
    is_contraction,
    is_invertible,
    is_normal,
)
from .decompose import (
    SplitReport,
    canonical_ar_contraction,
    levan_split,
    split_ar_unitary,
    wold_ar_isometry,
    wold_pure_range_form,
)
from .errors import AnnulusError
from .family import (
    FamilyReport,
    burdak_family,
    canonical_family,
    is_doubly_commuting,
    levan_family,
    unitary_family,
    wold_family,
)
from .linops import AnnulusParams, Subspace

__version__ = "0.1.0"

__all__ = [
    "AnnulusError",
    "AnnulusParams",
    "AtomLabel",
    "CnuLabel",
    "FamilyReport",
    "SplitReport",
    "Subspace",
    "UnitaryTypeLabel",
    "burdak_family",
    "canonical_ar_contraction",
    "canonical_family",
    "check_bp_identity",
    "check_brehmer",
    "classify_atom",
    "classify_cnu",
    "classify_unitary_type",
    "delta_mk",
    "is_ar_contraction_candidate",
    "is_ar_isometry",
    "is_ar_unitary",
    "is_contraction",
    "is_doubly_commuting",
    "is_invertible",
    "is_normal",
    "levan_family",
    "levan_split",
    "single_binomial_residual",
    "split_ar_unitary",
    "szego_operator",
    "unitary_family",
    "wold_ar_isometry",
    "wold_family",
    "wold_pure_range_form",
]
