"""Joint decompositions of finite operator tuples.

The 2**n splits refine the space one component at a time: split by the
first operator, compress the whole tuple to each part, split the
compressions by the second operator, and so on. Double commutativity is
what makes every intermediate part jointly reducing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .classify import AtomLabel, classify_atom, is_ar_contraction_candidate, is_ar_isometry, is_ar_unitary
from .decompose import canonical_ar_contraction, levan_split, split_ar_unitary, wold_ar_isometry
from .errors import (
    DimensionMismatch,
    ExplicitCapError,
    NotACandidate,
    NotArIsometry,
    NotArUnitary,
    NotCnu,
    NotCommuting,
    NotDoublyCommuting,
)
from .linops import (
    Subspace,
    _reorthonormalize,
    as_matrix,
    complement,
    compress,
    direct_sum,
    intersect,
    kernel,
    largest_reducing_within,
    opnorm,
    reduction_residual,
)

__all__ = [
    "MAX_TUPLE",
    "FamilyReport",
    "assignments",
    "is_commuting",
    "is_doubly_commuting",
    "canonical_family",
    "wold_family",
    "unitary_family",
    "levan_family",
    "burdak_family",
    "doubly_commuting_part",
]

MAX_TUPLE = 16

ATOM_ALPHABET = ("t_u", "t_c")
UNITARY_ALPHABET = ("u", "r")
LEVAN_ALPHABET = ("t_p", "t_cni")


@dataclass
class FamilyReport:
    """Labeled joint decomposition of a tuple.

    ``parts`` is a list of ``(assignment, Subspace)`` where an assignment is
    a tuple with one label per component. Zero-dimensional parts are kept
    so the shape of the report does not depend on the input. ``remainder``
    is ``None`` or a ``(Subspace, tag)`` pair.
    """

    parts: list
    alphabet: tuple
    remainder: tuple | None = None
    diagnostics: dict = field(default_factory=dict)

    def space(self, assignment):
        assignment = tuple(assignment)
        for key, space in self.parts:
            if key == assignment:
                return space
        raise KeyError(assignment)

    __getitem__ = space

    @property
    def dims(self):
        return {key: space.dim for key, space in self.parts}

    @property
    def ambient_dim(self):
        return self.parts[0][1].ambient_dim


def assignments(n, alphabet=ATOM_ALPHABET):
    """All label tuples of length ``n`` in lexicographic order of ``alphabet``."""
    return list(itertools.product(alphabet, repeat=n))


def _prepare(ops):
    mats = [as_matrix(T) for T in ops]
    if not mats:
        raise ValueError("need at least one operator")
    if len(mats) > MAX_TUPLE:
        raise ExplicitCapError(f"tuples longer than {MAX_TUPLE} are not supported (got {len(mats)})")
    n = mats[0].shape[0]
    if any(T.shape[0] != n for T in mats):
        raise DimensionMismatch("operators act on spaces of different dimension")
    return mats


def _pair_scale(A, B):
    return max(opnorm(A) * opnorm(B), np.finfo(float).tiny)


def is_commuting(ops, tol_id=1e-8):
    mats = _prepare(ops)
    for A, B in itertools.combinations(mats, 2):
        if opnorm(A @ B - B @ A) > tol_id * _pair_scale(A, B):
            return False
    return True


def is_doubly_commuting(ops, tol_id=1e-8):
    """Pairwise commuting, and each operator commutes with the adjoints of the others."""
    mats = _prepare(ops)
    if len(mats) < 2:
        return True
    for A, B in itertools.combinations(mats, 2):
        scale = tol_id * _pair_scale(A, B)
        if opnorm(A @ B - B @ A) > scale:
            return False
        if opnorm(A @ B.conj().T - B.conj().T @ A) > scale:
            return False
    return True


def _refine(mats, p, splitter, grouping, alphabet, basis=None):
    """Recursive 2**n refinement; returns ``{assignment: Subspace}``.

    ``grouping`` maps each output label to the labels of ``splitter``'s
    report that are merged into it.
    """
    n_ambient = mats[0].shape[0]
    found = {}

    def descend(index, frame, prefix):
        if frame.shape[1] == 0:
            return
        if index == len(mats):
            found[prefix] = Subspace(frame)
            return
        local = frame.conj().T @ mats[index] @ frame
        report = splitter(local, p)
        for label in alphabet:
            pieces = [report[name] for name in grouping[label]]
            sub = direct_sum(*pieces, tol_rank=p.tol_rank)
            if sub.dim == 0:
                continue
            descend(index + 1, _reorthonormalize(frame @ sub.basis), prefix + (label,))

    start = np.eye(n_ambient, dtype=complex) if basis is None else basis.basis
    descend(0, start, ())
    return {key: found.get(key, Subspace.zero(n_ambient)) for key in assignments(len(mats), alphabet)}


def _joint_residuals(mats, parts):
    """Per part, the reduction residual of each component."""
    return {key: [reduction_residual(T, space) for T in mats] for key, space in parts}


def _report(mats, spaces, alphabet, **diagnostics):
    parts = list(spaces.items())
    diag = {"joint_reduction_residuals": _joint_residuals(mats, parts)}
    diag.update(diagnostics)
    return FamilyReport(parts=parts, alphabet=alphabet, diagnostics=diag)


def canonical_family(ops, p):
    """2**n split of doubly commuting candidates over ``{t_u, t_c}``.

    The all-``t_u`` part is the largest joint reducing subspace on which
    every component is an annulus unitary.
    """
    mats = _prepare(ops)
    for i, T in enumerate(mats):
        if not is_ar_contraction_candidate(T, p):
            raise NotACandidate(f"component {i} fails the annulus-contraction candidate test")
    if not is_doubly_commuting(mats, p.tol_id):
        raise NotDoublyCommuting("tuple is not doubly commuting")
    spaces = _refine(
        mats, p, canonical_ar_contraction, {"t_u": ("u", "r"), "t_c": ("c",)}, ATOM_ALPHABET
    )
    return _report(mats, spaces, ATOM_ALPHABET)


def wold_family(ops, p):
    """2**n Wold split of doubly commuting annulus isometries over ``{t_u, t_c}``.

    ``t_c`` marks the pure part; every such part is ``{0}`` in finite
    dimensions and the diagnostics record whether that held.
    """
    mats = _prepare(ops)
    for i, V in enumerate(mats):
        if not is_ar_isometry(V, p):
            raise NotArIsometry(f"component {i} is not an annulus isometry")
    if not is_doubly_commuting(mats, p.tol_id):
        raise NotDoublyCommuting("tuple is not doubly commuting")
    spaces = _refine(mats, p, wold_ar_isometry, {"t_u": ("u", "r"), "t_c": ("p",)}, ATOM_ALPHABET)
    pure_empty = all(space.dim == 0 for key, space in spaces.items() if "t_c" in key)
    return _report(mats, spaces, ATOM_ALPHABET, pure_parts_empty=pure_empty)


def unitary_family(ops, p):
    """2**n split of commuting annulus unitaries over ``{u, r}``."""
    mats = _prepare(ops)
    for i, T in enumerate(mats):
        if not is_ar_unitary(T, p):
            raise NotArUnitary(f"component {i} is not an annulus unitary")
    if not is_commuting(mats, p.tol_id):
        raise NotCommuting("tuple is not commuting")
    spaces = _refine(mats, p, split_ar_unitary, {"u": ("u",), "r": ("r",)}, UNITARY_ALPHABET)
    return _report(mats, spaces, UNITARY_ALPHABET)


def levan_family(ops, p):
    """2**n split of doubly commuting c.n.u. candidates over ``{t_p, t_cni}``."""
    mats = _prepare(ops)
    for i, T in enumerate(mats):
        if classify_atom(T, p) is not AtomLabel.T_C:
            raise NotCnu(f"component {i} is not a c.n.u. annulus contraction")
    if not is_doubly_commuting(mats, p.tol_id):
        raise NotDoublyCommuting("tuple is not doubly commuting")
    spaces = _refine(mats, p, levan_split, {"t_p": ("iso",), "t_cni": ("cni",)}, LEVAN_ALPHABET)
    pure_empty = all(space.dim == 0 for key, space in spaces.items() if "t_p" in key)
    return _report(mats, spaces, LEVAN_ALPHABET, pure_parts_empty=pure_empty)


def doubly_commuting_part(ops, p):
    """Largest joint reducing subspace on which the tuple doubly commutes.

    Found as the largest joint reducing subspace inside the common kernel
    of the defects ``T_i T_j^H - T_j^H T_i`` (i != j).
    """
    mats = _prepare(ops)
    n = mats[0].shape[0]
    if len(mats) < 2:
        return Subspace.full(n)
    defects = []
    scale = 0.0
    for i, j in itertools.permutations(range(len(mats)), 2):
        A, B = mats[i], mats[j]
        defects.append(A @ B.conj().T - B.conj().T @ A)
        scale = max(scale, _pair_scale(A, B))
    K = kernel(np.vstack(defects), p.tol_rank, atol=p.tol_id * scale)
    return largest_reducing_within(mats, K, p.tol_rank)


def _annulus_unitary_kernel(T, p):
    """Vectors on which the normality and annulus-unitary defects of ``T`` vanish."""
    H = T.conj().T
    G = H @ T
    eye = np.eye(T.shape[0])
    scale = max(opnorm(T) ** 2, 1.0)
    stacked = np.vstack([G - T @ H, (eye - G) @ (G - p.r * p.r * eye)])
    return kernel(stacked, p.tol_rank, atol=p.tol_id * scale)


def _strongly_cnu_check(mats, space, p):
    """Dimensions of the largest joint reducing subspaces of ``space`` carrying
    annulus unitaries in every component except one (one entry per left-out index).

    All zero means the restricted tuple is strongly c.n.u.
    """
    if space.dim == 0:
        return {}
    local = [compress(T, space) for T in mats]
    n_ops = len(local)
    out = {}
    for left_out in range(n_ops):
        K = Subspace.full(space.dim)
        for i in range(n_ops):
            if i == left_out:
                continue
            K_i = _annulus_unitary_kernel(local[i], p)
            K = intersect(K, K_i, p.tol_rank)
        out[left_out] = largest_reducing_within(local, K, p.tol_rank).dim
    return out


def burdak_family(ops, p):
    """(n + 2)-part split of commuting candidates that need not doubly commute.

    Parts are the all-``t_u`` assignment and the ``n`` assignments with a
    single ``t_c``, each computed inside the largest doubly commuting joint
    reducing subspace; the remainder is tagged ``strongly_cnu``. The
    diagnostics carry a leave-one-out certificate for the remainder.
    """
    mats = _prepare(ops)
    for i, T in enumerate(mats):
        if not is_ar_contraction_candidate(T, p):
            raise NotACandidate(f"component {i} fails the annulus-contraction candidate test")
    if not is_commuting(mats, p.tol_id):
        raise NotCommuting("tuple is not commuting")
    n_ops = len(mats)
    n = mats[0].shape[0]

    h_dc = doubly_commuting_part(mats, p)
    if h_dc.dim:
        local = [compress(T, h_dc) for T in mats]
        inner = _refine(
            local, p, canonical_ar_contraction, {"t_u": ("u", "r"), "t_c": ("c",)}, ATOM_ALPHABET
        )
    else:
        inner = {}

    kept = [key for key in assignments(n_ops) if key.count("t_c") <= 1]
    spaces = {}
    for key in kept:
        local_space = inner.get(key)
        if local_space is None or local_space.dim == 0:
            spaces[key] = Subspace.zero(n)
        else:
            spaces[key] = Subspace(_reorthonormalize(h_dc.basis @ local_space.basis))

    h_s = complement(direct_sum(*spaces.values(), tol_rank=p.tol_rank))
    leave_one_out = _strongly_cnu_check(mats, h_s, p)
    report = _report(
        mats,
        spaces,
        ATOM_ALPHABET,
        doubly_commuting_dim=h_dc.dim,
        leave_one_out_dims=leave_one_out,
        strongly_cnu_verified=all(d == 0 for d in leave_one_out.values()),
    )
    report.remainder = (h_s, "strongly_cnu")
    report.diagnostics["joint_reduction_residuals"]["strongly_cnu"] = [
        reduction_residual(T, h_s) for T in mats
    ]
    return report
