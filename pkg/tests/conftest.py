import itertools

import numpy as np
import pytest
from scipy.linalg import block_diag

from annulus_ops.linops import AnnulusParams, Subspace
from annulus_ops.models import haar_unitary, random_cnu

JORDAN = np.array([[0.7, 0.1], [0.0, 0.7]])


@pytest.fixture
def p():
    return AnnulusParams(0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def unimodular(rng, size=None):
    return np.exp(2j * np.pi * rng.random(size))


def cnu_scalar(rng, r):
    lo, hi = r + 0.1 * (1 - r), 1 - 0.1 * (1 - r)
    return rng.uniform(lo, hi) * unimodular(rng)


def planted_doubly_commuting(n_ops, r, rng, seed=0):
    """Doubly commuting planted tuple with every {t_u, t_c}^n part nonzero.

    Returns ``(ops, expected)`` with ``expected`` mapping each assignment to
    its planted subspace after a Haar conjugation.
    """
    blocks = []
    for labels in itertools.product(("t_u", "t_c"), repeat=n_ops):
        cnu_slots = [i for i, lab in enumerate(labels) if lab == "t_c"]
        # one or two slots get genuine 2x2 non-normal factors, the rest scalars
        factors = len(cnu_slots[:2])
        dim = 2 ** factors
        mats = []
        for i, lab in enumerate(labels):
            if lab == "t_u":
                radius = 1.0 if rng.random() < 0.5 else r
                mats.append(radius * unimodular(rng) * np.eye(dim))
            elif i in cnu_slots[:2]:
                A = random_cnu(2, r, rng)
                pos = cnu_slots.index(i)
                if factors == 1:
                    mats.append(A)
                elif pos == 0:
                    mats.append(np.kron(A, np.eye(2)))
                else:
                    mats.append(np.kron(np.eye(2), A))
            else:
                mats.append(cnu_scalar(rng, r) * np.eye(dim))
        blocks.append((mats, labels))

    total = sum(m[0].shape[0] for m, _ in blocks)
    Q = haar_unitary(total, seed)
    ops = [Q @ block_diag(*(m[i] for m, _ in blocks)) @ Q.conj().T for i in range(n_ops)]
    expected = {}
    offset = 0
    for mats, labels in blocks:
        k = mats[0].shape[0]
        expected[labels] = Subspace.coordinate(total, range(offset, offset + k)).transform(Q)
        offset += k
    return ops, expected


def assert_tiles(parts, n, tol=1e-8):
    spaces = [s for s in parts if s.dim]
    assert sum(s.dim for s in spaces) == n
    for a, b in itertools.combinations(spaces, 2):
        assert np.linalg.norm(a.basis.conj().T @ b.basis, 2) <= tol


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
