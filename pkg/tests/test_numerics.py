import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from oracles import sturm_roots
from wkspin.errors import IdenticallyZero, NoCommonRoot
from wkspin.numerics import (
    CubicCoeffs,
    ToleranceConfig,
    common_real_roots,
    real_roots_cubic,
    real_roots_quadratic,
    rk4_integrate,
    rk4_step,
)

SQ5 = math.sqrt(5.0)


def test_triple_root():
    assert real_roots_cubic(CubicCoeffs(1, 0, 0, 0)) == [0.0, 0.0, 0.0]


def test_degree_drop_to_km_quadratic():
    roots = real_roots_cubic(CubicCoeffs(0, 4, -2, -1))
    assert roots == pytest.approx([(1 - SQ5) / 4, (1 + SQ5) / 4], abs=1e-15)


def test_three_real_roots_against_sturm():
    roots = real_roots_cubic(CubicCoeffs(3, 18, -12, -8))
    expected = sturm_roots([3, 18, -12, -8])
    assert len(roots) == 3
    assert roots == pytest.approx(expected, abs=1e-10)
    # frozen from a 50-digit mpmath evaluation
    assert roots == pytest.approx([-6.5486321704130305, -0.42027662546120617, 0.96890879587423662],
                                  abs=1e-12)


def test_zero_polynomial_raises():
    with pytest.raises(IdenticallyZero):
        real_roots_cubic(CubicCoeffs(0, 0, 0, 0))


def test_quadratic_double_root_under_rounding():
    # (x - 0.1)^2 with coefficients rounded
    r = real_roots_quadratic(1.0, -0.2, 0.1 * 0.1)
    assert r == pytest.approx([0.1, 0.1], abs=1e-8)


def _distinct(rs, tol=1e-7):
    out = []
    for r in sorted(rs):
        if not out or abs(r - out[-1]) > tol * max(1, abs(r)):
            out.append(r)
    return out


@pytest.mark.parametrize("seed", range(5))
def test_random_cubics_match_sturm(seed):
    """1000 cubics in total, 5% with a near-zero leading coefficient."""
    rng = np.random.default_rng(seed)
    for k in range(200):
        c = rng.uniform(-3, 3, size=4)
        if k % 20 == 0:
            c[0] = 1e-14 * rng.uniform(-1, 1)
        got = _distinct(real_roots_cubic(CubicCoeffs(*c)))
        if abs(c[0]) <= 1e-12 * max(abs(c)):
            want = sturm_roots(list(c[1:]))
        else:
            want = sturm_roots(list(c))
        assert len(got) == len(want), (c, got, want)
        assert got == pytest.approx(want, abs=1e-10, rel=1e-10)


def test_common_roots_basic():
    assert common_real_roots([(1, 0, -1), (0, 1, -1)], 1e-8) == pytest.approx([1.0])


def test_common_roots_clusters_close_roots():
    got = common_real_roots([(1, 0, -2), (1, 0, -2.000000001)], 1e-8)
    assert got == pytest.approx([-math.sqrt(2), math.sqrt(2)], abs=1e-9)


def test_common_roots_none():
    with pytest.raises(NoCommonRoot):
        common_real_roots([(0, 1, -1), (0, 1, -2)], 1e-8)


def test_common_roots_ignores_rounding_polys():
    got = common_real_roots([(0, 1, -1), (1e-17, -1e-17, 0)], 1e-8)
    assert got == pytest.approx([1.0])


def test_rk4_zero_generator():
    psi = np.array([1 + 2j, -0.5j])
    np.testing.assert_array_equal(rk4_step(np.zeros((2, 2)), psi, 0.1), psi)


def test_rk4_full_period():
    f = 1j * math.pi * np.eye(2)
    psi = np.array([0.6, 0.8j])
    end = rk4_integrate(f, psi, 2.0, 1e-3)[-1]
    assert np.abs(end - psi).max() < 1e-10


def _anti_hermitian(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return a - a.conj().T


def test_rk4_fourth_order():
    rng = np.random.default_rng(7)
    f = _anti_hermitian(rng)
    psi = np.array([1.0, 1j]) / math.sqrt(2)
    exact = expm(f) @ psi
    e1 = np.linalg.norm(rk4_integrate(f, psi, 1.0, 0.02)[-1] - exact)
    e2 = np.linalg.norm(rk4_integrate(f, psi, 1.0, 0.01)[-1] - exact)
    assert 12 < e1 / e2 < 20


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_rk4_norm_preserved(seed):
    rng = np.random.default_rng(seed)
    f = _anti_hermitian(rng) / 2
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    traj = rk4_integrate(f, psi, 1.0, 1e-3)
    n0 = np.vdot(psi, psi).real
    assert max(abs(np.vdot(x, x).real - n0) for x in traj) / n0 < 1e-9


def test_kernels_deterministic():
    c = CubicCoeffs(3, 18, -12, -8)
    assert real_roots_cubic(c) == real_roots_cubic(c)


def test_tolerances_validated():
    with pytest.raises(ValueError):
        ToleranceConfig(defect_tol=0.0)
    t = ToleranceConfig().with_overrides(defect_tol=1e-8, residual_tol=None)
    assert t.defect_tol == 1e-8 and t.residual_tol == 1e-9
