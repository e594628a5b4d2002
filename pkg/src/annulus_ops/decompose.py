"""Orthogonal decompositions of a single operator.

Infinite intersections of defect kernels are truncated once each chain of
kernels stops shrinking; the chains are monotone for contractions, so this
happens after at most ``dim + 1`` powers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classify import (
    AtomLabel,
    classify_atom,
    is_ar_contraction_candidate,
    is_ar_isometry,
    is_ar_unitary,
    _isometry_form,
)
from .errors import NotACandidate, NotArIsometry, NotArUnitary, NotCnu, NumericalFailure, SingularOperator
from .linops import (
    Subspace,
    as_matrix,
    complement,
    compress,
    direct_sum,
    intersect,
    kernel,
    largest_reducing_within,
    opnorm,
    reduction_residual,
    span,
)

__all__ = [
    "SplitReport",
    "defect_chain",
    "split_ar_unitary",
    "wold_ar_isometry",
    "wold_pure_range_form",
    "canonical_ar_contraction",
    "levan_split",
]

_UNDERFLOW = 1e-300


@dataclass
class SplitReport:
    """Labeled orthogonal decomposition of the ambient space.

    ``residuals`` holds, per label, the worst reduction residual of the part
    for ``T`` and ``T^H``; ``identity_residuals`` the defect of the identity
    that characterizes the part (only for parts that have one).
    """

    parts: list
    r_used: float
    residuals: dict = field(default_factory=dict)
    identity_residuals: dict = field(default_factory=dict)
    orthogonality: float = 0.0
    notes: list = field(default_factory=list)

    def __getitem__(self, label):
        for name, space in self.parts:
            if name == label:
                return space
        raise KeyError(label)

    @property
    def labels(self):
        return [name for name, _ in self.parts]

    @property
    def dims(self):
        return {name: space.dim for name, space in self.parts}

    @property
    def ambient_dim(self):
        return self.parts[0][1].ambient_dim


def defect_chain(T, p, *, right=False, both=False):
    """``∩_k Ker(I - T^Hk T^k)`` (or the ``T^k T^Hk`` variant, or both).

    ``right=True`` uses ``I - T^k T^Hk``; ``both=True`` intersects the two
    families. Every chain is stopped on its own as soon as its kernel
    dimension repeats.
    """
    T = as_matrix(T)
    n = T.shape[0]
    kinds = ("left", "right") if both else (("right",) if right else ("left",))
    eye = np.eye(n)
    running = Subspace.full(n)
    last = {kind: n + 1 for kind in kinds}
    active = list(kinds)
    Tk = eye.astype(complex)
    for _ in range(n + 1):
        Tk = Tk @ T
        if opnorm(Tk) < _UNDERFLOW:
            break
        for kind in list(active):
            if kind == "left":
                D = eye - Tk.conj().T @ Tk
            else:
                D = eye - Tk @ Tk.conj().T
            K = kernel(D, p.tol_rank, atol=p.tol_id)
            running = intersect(running, K, p.tol_rank)
            if K.dim == last[kind]:
                active.remove(kind)
            last[kind] = K.dim
        if not active or running.dim == 0:
            break
    return running


def _r_inverse(T, p):
    s = np.linalg.svd(T, compute_uv=False)
    if s[0] == 0 or s[-1] <= p.tol_rank * s[0]:
        raise SingularOperator("operator is not invertible to tolerance")
    return p.r * np.linalg.inv(T)


def _resolve_toward_u(h_u, h_r, p):
    """Drop from ``h_r`` whatever it shares with ``h_u``.

    When ``r`` is within tolerance of 1 the two circles cannot be told
    apart and both chains claim the same vectors; such ties go to ``u``.
    """
    if intersect(h_u, h_r, p.tol_rank).dim == 0:
        return h_r
    return intersect(h_r, complement(h_u), p.tol_rank)


def _finish(T, parts, p, identity=None):
    report = SplitReport(parts=parts, r_used=p.r)
    for name, space in parts:
        report.residuals[name] = reduction_residual(T, space)
    identity = identity or {}
    for name, space in parts:
        if name in identity and space.dim:
            report.identity_residuals[name] = identity[name](compress(T, space))
    worst = 0.0
    for i, (_, a) in enumerate(parts):
        for _, b in parts[i + 1:]:
            if a.dim and b.dim:
                worst = max(worst, opnorm(a.basis.conj().T @ b.basis))
    report.orthogonality = worst
    total = sum(space.dim for _, space in parts)
    if total != T.shape[0]:
        raise NumericalFailure(
            f"parts do not tile the space: dimensions {[s.dim for _, s in parts]} for n={T.shape[0]}"
        )
    return report


def _unitary_defect(B):
    return opnorm(B.conj().T @ B - np.eye(B.shape[0]))


def _r_unitary_defect(r):
    return lambda B: opnorm(B.conj().T @ B - r * r * np.eye(B.shape[0]))


def split_ar_unitary(T, p):
    """Unitary / r-times-unitary split of an annulus unitary (labels ``u``, ``r``)."""
    T = as_matrix(T)
    if not is_ar_unitary(T, p):
        raise NotArUnitary("operator is not an annulus unitary")
    h_u = defect_chain(T, p)
    h_r = _resolve_toward_u(h_u, defect_chain(_r_inverse(T, p), p), p)
    return _finish(
        T,
        [("u", h_u), ("r", h_r)],
        p,
        identity={"u": _unitary_defect, "r": _r_unitary_defect(p.r)},
    )


def wold_ar_isometry(V, p):
    """Wold split of an annulus isometry (labels ``u``, ``r``, ``p``).

    ``p`` is the pure part, taken as the complement of ``u ⊕ r``; in finite
    dimensions it is always ``{0}``.
    """
    V = as_matrix(V)
    if not is_ar_isometry(V, p):
        raise NotArIsometry("operator is not an annulus isometry")
    h_u = defect_chain(V, p, right=True)
    h_r = _resolve_toward_u(h_u, defect_chain(_r_inverse(V, p), p, right=True), p)
    h_p = complement(direct_sum(h_u, h_r, tol_rank=p.tol_rank))
    report = _finish(
        V,
        [("u", h_u), ("r", h_r), ("p", h_p)],
        p,
        identity={"u": _unitary_defect, "r": _r_unitary_defect(p.r)},
    )
    if h_p.dim == 0:
        report.notes.append("pure part is {0}, as it must be in finite dimensions")
    return report


def _range(D, p):
    """Numerical range (column space) of a Hermitian defect operator."""
    return span(D, tol_rank=p.tol_rank, atol=p.tol_id)


def wold_pure_range_form(V, p):
    """Pure part of the Wold split computed from closed spans of defect ranges.

    Independent of :func:`wold_ar_isometry`: intersects the span of
    ``Ran(I - V^k V^Hk)`` with the span of the analogous ranges for
    ``r V^-1``, accumulating over ``k`` until both spans stop growing.
    """
    V = as_matrix(V)
    if not is_ar_isometry(V, p):
        raise NotArIsometry("operator is not an annulus isometry")
    n = V.shape[0]
    eye = np.eye(n)
    spans = []
    for X in (V, _r_inverse(V, p)):
        acc = Subspace.zero(n)
        Xk = eye.astype(complex)
        for _ in range(n + 1):
            Xk = Xk @ X
            grown = direct_sum(acc, _range(eye - Xk @ Xk.conj().T, p), tol_rank=p.tol_rank)
            if grown.dim == acc.dim:
                break
            acc = grown
        spans.append(acc)
    return intersect(spans[0], spans[1], p.tol_rank)


def canonical_ar_contraction(T, p):
    """Canonical split of a candidate into ``u``, ``r`` (annulus-unitary) and ``c`` (c.n.u.)."""
    T = as_matrix(T)
    if not is_ar_contraction_candidate(T, p):
        raise NotACandidate("operator fails the annulus-contraction candidate test")
    h_u = defect_chain(T, p, both=True)
    h_r = _resolve_toward_u(h_u, defect_chain(_r_inverse(T, p), p, both=True), p)
    h_c = complement(direct_sum(h_u, h_r, tol_rank=p.tol_rank))
    return _finish(
        T,
        [("u", h_u), ("r", h_r), ("c", h_c)],
        p,
        identity={"u": _unitary_defect, "r": _r_unitary_defect(p.r)},
    )


def levan_split(T, p):
    """Split a c.n.u. candidate into a pure-isometry part ``iso`` and a c.n.i. part ``cni``.

    ``iso`` is the largest reducing subspace inside the kernel of the
    annulus-isometry form ``-T^H^2 T^2 + (1 + r^2) T^H T - r^2 I``.
    """
    T = as_matrix(T)
    if classify_atom(T, p) is not AtomLabel.T_C:
        raise NotCnu("operator is not a c.n.u. annulus contraction")
    Q = _isometry_form(T, p.r)
    K = kernel(Q, p.tol_rank, atol=p.tol_id)
    h_1 = largest_reducing_within([T], K, p.tol_rank)
    h_2 = complement(h_1)
    report = _finish(
        T,
        [("iso", h_1), ("cni", h_2)],
        p,
        identity={"iso": lambda B: opnorm(_isometry_form(B, p.r))},
    )
    if h_1.dim == 0:
        report.notes.append("pure-isometry part is {0}, as it must be in finite dimensions")
    return report
