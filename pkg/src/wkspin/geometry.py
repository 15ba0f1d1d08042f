"""Curvature and metric data of the left-invariant metrics X^3(K, L, M).

Frame conventions (used everywhere in the package):

* ``e1, e2, e3`` is the orthonormal left-invariant frame, ``sigma^i`` its dual coframe.
* Coframe differentials: ``d sigma^1 = (L-K) sigma^2^sigma^3``,
  ``d sigma^2 = (M+K) sigma^1^sigma^3``, ``d sigma^3 = (L-M) sigma^1^sigma^2``.
* Brackets follow from ``d sigma^k(e_i, e_j) = -sigma^k([e_i, e_j])``:
  ``[e2,e3] = (K-L) e1``, ``[e3,e1] = (M+K) e2``, ``[e1,e2] = (M-L) e3``.
* Connection forms are ``omega_ij(X) = <nabla_X e_i, e_j>``. With this choice the
  structure equation reads ``d sigma^i = sum_j omega_ij ^ sigma^j`` and the only
  nonzero coefficients are ``omega_12(e3) = K``, ``omega_13(e2) = L``, ``omega_23(e1) = M``.
  Readers using ``d sigma^i = -sum_j omega_ij ^ sigma^j`` see one global sign flip.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetric


@dataclass(frozen=True)
class ModelParams:
    K: float
    L: float
    M: float

    def as_array(self) -> np.ndarray:
        return np.array([self.K, self.L, self.M], dtype=float)

    def scaled(self, mu: float) -> "ModelParams":
        return ModelParams(mu * self.K, mu * self.L, mu * self.M)

    def norm(self) -> float:
        return math.sqrt(self.K**2 + self.L**2 + self.M**2)

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in (self.K, self.L, self.M))

    def is_zero(self) -> bool:
        return self.K == 0.0 and self.L == 0.0 and self.M == 0.0

    @classmethod
    def coerce(cls, p) -> "ModelParams":
        if isinstance(p, ModelParams):
            return p
        K, L, M = (float(v) for v in p)
        return cls(K, L, M)


@dataclass(frozen=True)
class CurvatureData:
    b1: float
    b2: float
    b3: float
    r1: float
    r2: float
    r3: float
    S: float
    ricci_norm_sq: float

    @property
    def brackets(self) -> tuple[float, float, float]:
        return (self.b1, self.b2, self.b3)

    @property
    def ricci(self) -> tuple[float, float, float]:
        return (self.r1, self.r2, self.r3)


@dataclass(frozen=True)
class MetricDiag:
    m11: float
    m22: float
    m33: float


class CurvatureClass(enum.Enum):
    FLAT = "Flat"
    EINSTEIN = "Einstein"
    GENERIC = "Generic"


@dataclass(frozen=True)
class Classification:
    kind: CurvatureClass
    scalar_sign: int  # -1, 0 or +1


def coframe_differentials(p) -> tuple[float, float, float]:
    """Coefficients of d sigma^1, d sigma^2, d sigma^3 as printed in the structure equations."""
    p = ModelParams.coerce(p)
    return (p.L - p.K, p.M + p.K, p.L - p.M)


def bracket_coefficients(p) -> tuple[float, float, float]:
    p = ModelParams.coerce(p)
    c1, c2, c3 = coframe_differentials(p)
    # d sigma^1(e2,e3) = c1 = -b1 ; d sigma^2(e3,e1) = -c2 = -b2 ; d sigma^3(e1,e2) = c3 = -b3
    return (-c1, c2, -c3)


def curvature(p) -> CurvatureData:
    p = ModelParams.coerce(p)
    K, L, M = p.K, p.L, p.M
    b1, b2, b3 = bracket_coefficients(p)
    r1, r2, r3 = -2.0 * K * L, 2.0 * K * M, -2.0 * L * M
    return CurvatureData(b1, b2, b3, r1, r2, r3, r1 + r2 + r3, r1 * r1 + r2 * r2 + r3 * r3)


def standard_basis_metric(p) -> MetricDiag:
    """The left-invariant metric written in the standard basis of so(3)."""
    p = ModelParams.coerce(p)
    ml, km, kl = abs(p.M - p.L), abs(p.K + p.M), abs(p.K - p.L)
    if ml == 0.0 or km == 0.0 or kl == 0.0:
        raise DegenerateMetric(f"vanishing factor in |M-L|={ml}, |K+M|={km}, |K-L|={kl}")
    return MetricDiag(1.0 / (ml * km), 1.0 / (kl * ml), 1.0 / (kl * km))


def structure_tensor(p) -> np.ndarray:
    """c[i, j, k] with [e_i, e_j] = sum_k c[i, j, k] e_k."""
    b = bracket_coefficients(p)
    c = np.zeros((3, 3, 3))
    for i, j, k in ((1, 2, 0), (2, 0, 1), (0, 1, 2)):
        c[i, j, k] = b[k]
        c[j, i, k] = -b[k]
    return c


def levi_civita(p) -> np.ndarray:
    """G[i, j, k] = <nabla_{e_i} e_j, e_k> from the Koszul formula for a left-invariant frame."""
    c = structure_tensor(p)
    return 0.5 * (c - np.einsum("jki->ijk", c) + np.einsum("kij->ijk", c))


def koszul_connection(p) -> dict[tuple[int, int, int], float]:
    """Connection coefficients omega_ij(e_k) for i < j (1-based keys (i, j, k))."""
    G = levi_civita(p)
    out = {}
    for i in range(3):
        for j in range(i + 1, 3):
            for k in range(3):
                out[(i + 1, j + 1, k + 1)] = float(G[k, i, j])
    return out


def riemann_tensor(p) -> np.ndarray:
    """R[a, b, c, d] = <R(e_a, e_b) e_c, e_d>, R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]."""
    c = structure_tensor(p)
    G = levi_civita(p)
    # nabla_a nabla_b e_z = G[b,z,m] G[a,m,:]
    nn = np.einsum("bzm,amd->abzd", G, G)
    return nn - np.einsum("abzd->bazd", nn) - np.einsum("abm,mzd->abzd", c, G)


def koszul_ricci(p) -> np.ndarray:
    """Ricci tensor (3x3) recomputed from the Koszul connection."""
    return np.einsum("iyzi->yz", riemann_tensor(p))


def classify(p, tol: float = 0.0) -> Classification:
    cd = curvature(p)
    r = cd.ricci
    scale = max(abs(v) for v in r)
    if scale <= tol:
        kind = CurvatureClass.FLAT
    elif max(r) - min(r) <= max(tol, 1e-14 * scale):
        kind = CurvatureClass.EINSTEIN
    else:
        kind = CurvatureClass.GENERIC
    S = cd.S
    sign = 0 if abs(S) <= max(tol, 1e-15 * scale) else (1 if S > 0 else -1)
    return Classification(kind, sign)
