import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wkspin.clifford import ID2, build_rep, clifford_of_vector, pair, spinor

REPS = [(s, o) for s in (1, -1) for o in (1, -1)]

cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
spinors = st.tuples(cplx, cplx).map(lambda t: spinor(*t))


@pytest.mark.parametrize("s, o", REPS)
def test_clifford_relations(s, o):
    g = build_rep(s, o)
    for i, j in itertools.product(range(3), repeat=2):
        anti = g[i] @ g[j] + g[j] @ g[i]
        assert np.abs(anti + 2 * (i == j) * ID2).max() < 1e-15
    for k in range(3):
        assert np.abs(g[k].conj().T + g[k]).max() < 1e-15
    assert np.abs(g.volume() - o * ID2).max() < 1e-15


def test_sign_flip_with_same_orientation():
    a, b = build_rep(1, 1), build_rep(-1, -1)
    for k in range(3):
        np.testing.assert_allclose(a[k], -b[k])


def test_reps_equivalent_when_volume_matches():
    """Reps with the same volume element are unitarily equivalent."""
    a, b = build_rep(1, 1), build_rep(-1, 1)
    # find U with U a_k U^-1 = b_k by solving the linear system
    rows = []
    for k in range(3):
        rows.append(np.kron(np.eye(2), a[k].T) - np.kron(b[k], np.eye(2)))
    _, sv, vh = np.linalg.svd(np.vstack(rows))
    assert sv[-1] < 1e-12
    U = vh[-1].conj().reshape(2, 2)
    for k in range(3):
        assert np.abs(U @ a[k] - b[k] @ U).max() < 1e-12


def test_clifford_of_vector():
    g = build_rep()
    np.testing.assert_array_equal(clifford_of_vector(g, (1, 0, 0)), g[0])
    np.testing.assert_array_equal(clifford_of_vector(g, (0, 0, 0)), np.zeros((2, 2)))
    X = clifford_of_vector(g, (3, 4, 0))
    assert np.abs(X @ X + 25 * ID2).max() < 1e-13


def test_pair_examples():
    assert pair(spinor(1, 0), spinor(1, 0)) == 1
    assert pair(spinor(1, 0), spinor(0, 1)) == 0


@settings(max_examples=100, deadline=None)
@given(spinors, spinors, cplx)
def test_pair_hermitian(phi, psi, c):
    assert pair(phi, psi) == pytest.approx(np.conj(pair(psi, phi)), abs=1e-9)
    assert pair(c * phi, psi) == pytest.approx(c * pair(phi, psi), abs=1e-7)
    assert pair(phi, c * psi) == pytest.approx(np.conj(c) * pair(phi, psi), abs=1e-7)
    assert pair(phi, phi).real >= 0


@settings(max_examples=100, deadline=None)
@given(spinors, spinors, st.tuples(*[st.floats(-5, 5)] * 3))
def test_clifford_skew(phi, psi, v):
    """(X.phi, psi) = -(phi, X.psi)."""
    X = clifford_of_vector(build_rep(), v)
    assert pair(X @ phi, psi) == pytest.approx(-pair(phi, X @ psi), abs=1e-8)
