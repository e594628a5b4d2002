"""Brehmer positivity operators and the alternating binomial sums behind them.

Subsets of a tuple are 0-based index tuples. For a subset ``u``,

    S(u) = sum over v ⊆ u of (-1)^|v| (T^e(v))^H T^e(v),   T^e(v) = prod_(j in v) T_j,

and for a multi-index ``k`` over the members of ``u``

    Delta(u, k) = sum over 0 <= p_i <= k_i of (-1)^|p| prod C(k_i, p_i) (T^p)^H T^p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .classify import is_ar_isometry
from .errors import BadMultiIndex, DimensionMismatch, NotArIsometry, NumericalFailure
from .linops import as_matrix, opnorm

__all__ = [
    "MAX_K",
    "BrehmerReport",
    "subsets",
    "szego_operator",
    "delta_mk",
    "single_binomial_residual",
    "check_brehmer",
    "check_bp_identity",
]

MAX_K = 30


def _prepare(ops):
    mats = [as_matrix(T) for T in ops]
    if not mats:
        raise DimensionMismatch("need at least one operator")
    n = mats[0].shape[0]
    if any(T.shape[0] != n for T in mats):
        raise DimensionMismatch("operators act on spaces of different dimension")
    return mats


def _check_subset(u, n_ops):
    u = tuple(int(i) for i in u)
    if not u:
        raise BadMultiIndex("subset must be nonempty")
    if len(set(u)) != len(u) or any(i < 0 or i >= n_ops for i in u):
        raise BadMultiIndex(f"subset {u} is not a set of indices in 0..{n_ops - 1}")
    return u


def subsets(n_ops):
    """Nonempty subsets of ``range(n_ops)``, by size then lexicographically."""
    return [c for size in range(1, n_ops + 1) for c in itertools.combinations(range(n_ops), size)]


def _power_product(mats, members, exps, cache):
    n = mats[0].shape[0]
    out = np.eye(n, dtype=complex)
    for j, e in zip(members, exps):
        if e == 0:
            continue
        key = (j, e)
        if key not in cache:
            cache[key] = np.linalg.matrix_power(mats[j], e)
        out = out @ cache[key]
    return out


def szego_operator(ops, u):
    """``S(u)``; the empty ``v`` contributes ``+I``."""
    mats = _prepare(ops)
    u = _check_subset(u, len(mats))
    return delta_mk(mats, u, [1] * len(u))


def delta_mk(ops, subset, k):
    """Alternating binomial sum over ``0 <= p_i <= k_i``.

    Coefficients are exact integers; terms are accumulated in order of
    increasing ``p_1 + ... + p_m``.
    """
    mats = _prepare(ops)
    subset = _check_subset(subset, len(mats))
    k = [int(x) for x in k]
    if len(k) != len(subset):
        raise BadMultiIndex(f"multi-index length {len(k)} does not match subset size {len(subset)}")
    if any(x < 1 or x > MAX_K for x in k):
        raise BadMultiIndex(f"entries of k must lie in 1..{MAX_K}, got {k}")
    n = mats[0].shape[0]
    cache = {}
    total = np.zeros((n, n), dtype=complex)
    exps = sorted(itertools.product(*(range(x + 1) for x in k)), key=lambda e: (sum(e), e))
    for e in exps:
        coeff = (-1) ** sum(e)
        for ki, pi in zip(k, e):
            coeff *= comb(ki, pi)
        P = _power_product(mats, subset, e, cache)
        total += float(coeff) * (P.conj().T @ P)
    return total


def single_binomial_residual(V, k, r):
    """``||sum_p (-1)^p C(k, p) V^Hp V^p - (1 - r^2)^(k-1) (I - V^H V)||``."""
    V = as_matrix(V)
    lhs = delta_mk([V], (0,), [k])
    rhs = (1 - r * r) ** (k - 1) * (np.eye(V.shape[0]) - V.conj().T @ V)
    return opnorm(lhs - rhs)


@dataclass
class BrehmerReport:
    """Minimum eigenvalue of the Hermitian part of ``S(u)`` for each subset."""

    min_eigenvalues: dict
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(v >= -self.tol for v in self.min_eigenvalues.values())

    @property
    def failures(self):
        return [u for u, v in self.min_eigenvalues.items() if v < -self.tol]


def _min_hermitian_eigenvalue(S):
    asym = opnorm(S - S.conj().T)
    if asym > 1e3 * np.finfo(float).eps * max(opnorm(S), 1.0):
        raise NumericalFailure(f"S(u) is not Hermitian to rounding (asymmetry {asym:.3e})")
    H = 0.5 * (S + S.conj().T)
    return float(np.linalg.eigvalsh(H)[0])


def check_brehmer(ops, p):
    """Brehmer positivity: ``S(u) >= -tol_id`` for every nonempty subset ``u``."""
    mats = _prepare(ops)
    mins = {u: _min_hermitian_eigenvalue(szego_operator(mats, u)) for u in subsets(len(mats))}
    return BrehmerReport(min_eigenvalues=mins, tol=p.tol_id)


def check_bp_identity(ops, subset, k, p):
    """``||Delta(u, k) - (1 - r^2)^(sum k - m) S(u)||`` for a tuple of annulus isometries."""
    mats = _prepare(ops)
    for i, V in enumerate(mats):
        if not is_ar_isometry(V, p):
            raise NotArIsometry(f"component {i} is not an annulus isometry")
    subset = _check_subset(subset, len(mats))
    lhs = delta_mk(mats, subset, k)
    factor = (1 - p.r * p.r) ** (sum(int(x) for x in k) - len(subset))
    return opnorm(lhs - factor * szego_operator(mats, subset))
