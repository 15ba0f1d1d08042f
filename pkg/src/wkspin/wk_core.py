"""Weak Killing spinors on X^3(K, L, M) and the Einstein-Dirac check.

On a left-invariant frame the weak Killing equation with constant scalar curvature
becomes the constant-coefficient system ``e_i(psi) = C_i psi`` on the group, where

    C_i = A_i - Gamma_i,   A_i = lam * (2 r_i / S - 1) * gamma_i,
    Gamma_1 = s/2 * M * gamma_2 gamma_3,  Gamma_2 = s/2 * L * gamma_1 gamma_3,
    Gamma_3 = s/2 * K * gamma_1 gamma_2.

A two-dimensional space of solutions exists on the simply connected group exactly
when the system is flat: ``[C_i, C_j] + b_k C_k = 0`` for the cyclic triples (i, j, k).
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import geometry
from .clifford import CliffordRep, build_rep, pair
from .errors import (
    CalibrationFailed,
    NegativeRadicand,
    NoCommonRoot,
    SignRuleUndefined,
    WKError,
    ZeroLambda,
    ZeroScalarCurvature,
    ZeroSpinor,
)
from .geometry import CurvatureData, ModelParams, curvature
from .numerics import DEFAULT_TOLERANCES, ToleranceConfig, common_real_roots, rk4_integrate

DIM = 3
# Coefficients of the dS terms of the general weak Killing equation. They multiply
# dS, which vanishes identically for constant Ricci eigenvalues.
DS_SCALAR_COEFF = DIM / (2.0 * (DIM - 1))
DS_CLIFFORD_COEFF = 1.0 / (2.0 * (DIM - 1))

# cyclic triples (i, j, k) with [e_i, e_j] = b_k e_k, zero-based
CYCLIC = ((1, 2, 0), (2, 0, 1), (0, 1, 2))

SASAKI_PLUS = ModelParams(1.0, (1.0 - math.sqrt(5.0)) / 4.0, 1.0)
SASAKI_MINUS = ModelParams(1.0, (1.0 + math.sqrt(5.0)) / 4.0, 1.0)


class Branch(enum.Enum):
    PLUS = "Plus"
    MINUS = "Minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1


@dataclass(frozen=True)
class WKNumber:
    value: float
    branch: Branch


@dataclass(frozen=True)
class Conventions:
    clifford_sign: int = 1
    spin_sign: int = 1
    orientation: int = 1

    def rep(self) -> CliffordRep:
        return build_rep(self.clifford_sign, self.orientation)


@dataclass(frozen=True)
class WKConnection:
    C: tuple
    A: tuple
    Gamma: tuple
    lam: float
    conventions: Conventions
    rep: CliffordRep


# ---------------------------------------------------------------- the variety


def variety_F(p) -> float:
    p = ModelParams.coerce(p)
    return float(sextic(p.K, p.L, p.M))


def sextic(K, L, M):
    """The degree-6 form defining the variety; accepts scalars or numpy arrays."""
    return (-K**2 * L * (L - M) ** 2 * M
            + L**3 * M**3
            + K * L**2 * M**2 * (M - L)
            + K**3 * (L - M) * (L + M) ** 2)


def variety_grad(p) -> np.ndarray:
    p = ModelParams.coerce(p)
    return np.array(sextic_grad(p.K, p.L, p.M), dtype=float)


def sextic_grad(K, L, M):
    dK = (-2 * K * L * (L - M) ** 2 * M
          + L**2 * M**2 * (M - L)
          + 3 * K**2 * (L - M) * (L + M) ** 2)
    dL = (-K**2 * M * ((L - M) ** 2 + 2 * L * (L - M))
          + 3 * L**2 * M**3
          + K * M**2 * (2 * L * (M - L) - L**2)
          + K**3 * ((L + M) ** 2 + 2 * (L - M) * (L + M)))
    dM = (-K**2 * L * ((L - M) ** 2 - 2 * M * (L - M))
          + 3 * L**3 * M**2
          + K * L**2 * (2 * M * (M - L) + M**2)
          + K**3 * (-(L + M) ** 2 + 2 * (L - M) * (L + M)))
    return dK, dL, dM


# ---------------------------------------------------------------- WK-numbers


def _sign_branch(p: ModelParams) -> Branch:
    if p.M + p.K == 0.0:
        raise SignRuleUndefined("M = -K: the sign rule does not apply")
    return Branch.PLUS if -p.K < p.M else Branch.MINUS


def wk_number(p) -> WKNumber:
    """WK-number from the closed formula
    lam = +/- S/(2 sqrt 2) * sqrt(S / (S^2 - |Ric|^2)), sign by -K < M or M < -K.

    Note: this closed form does not make the WK system integrable; see
    ``integrable_wk_number`` and ``solve_wk_numbers``.
    """
    p = ModelParams.coerce(p)
    cd = curvature(p)
    return _closed_form_lambda(p, cd, ricci_weight=1.0)


def integrable_wk_number(p) -> WKNumber:
    """Closed form of the WK-number for which the system is actually flat:
    lam = +/- S/(2 sqrt 2) * sqrt(S / (S^2 - 2 |Ric|^2)), same sign rule.

    Agrees with ``solve_wk_numbers`` on the variety; ``|Ric|^2`` enters with weight 2.
    """
    p = ModelParams.coerce(p)
    return _closed_form_lambda(p, curvature(p), ricci_weight=2.0)


def _closed_form_lambda(p: ModelParams, cd: CurvatureData, ricci_weight: float) -> WKNumber:
    S = cd.S
    if S == 0.0:
        raise ZeroScalarCurvature("scalar curvature vanishes")
    den = S * S - ricci_weight * cd.ricci_norm_sq
    if den == 0.0:
        raise NegativeRadicand("S^2 - |Ric|^2 vanishes (pole of the formula)")
    rad = S / den
    if rad < 0.0:
        raise NegativeRadicand(f"S/(S^2 - |Ric|^2) = {rad} < 0")
    branch = _sign_branch(p)
    mag = S / (2.0 * math.sqrt(2.0)) * math.sqrt(rad)
    return WKNumber(branch.sign * mag, branch)


def expected_lambda_sign(p) -> int:
    """Sign of lam implied by the sign rule: branch sign times sign(S)."""
    p = ModelParams.coerce(p)
    S = curvature(p).S
    return _sign_branch(p).sign * (1 if S > 0 else -1)


# ---------------------------------------------------------------- connection


def _parts(p: ModelParams, conv: Conventions, rep: CliffordRep | None = None):
    cd = curvature(p)
    if cd.S == 0.0:
        raise ZeroScalarCurvature("scalar curvature vanishes")
    g = rep if rep is not None else conv.rep()
    s = 0.5 * conv.spin_sign
    a = tuple((2.0 * cd.ricci[i] / cd.S - 1.0) * g[i] for i in range(3))
    Gam = (s * p.M * (g[1] @ g[2]), s * p.L * (g[0] @ g[2]), s * p.K * (g[0] @ g[1]))
    return cd, g, a, Gam


def wk_connection_matrices(p, lam: float, conv: Conventions | None = None,
                           rep: CliffordRep | None = None) -> WKConnection:
    p = ModelParams.coerce(p)
    conv = conv if conv is not None else calibrate_conventions()
    _, g, a, Gam = _parts(p, conv, rep)
    A = tuple(lam * ai for ai in a)
    C = tuple(A[i] - Gam[i] for i in range(3))
    return WKConnection(C, A, Gam, float(lam), conv, g)


def defect_matrices(W: WKConnection, c: CurvatureData) -> list[np.ndarray]:
    C, b = W.C, c.brackets
    return [C[i] @ C[j] - C[j] @ C[i] + b[k] * C[k] for i, j, k in CYCLIC]


def integrability_defect(W: WKConnection, c: CurvatureData) -> float:
    return max(float(np.abs(D).max()) for D in defect_matrices(W, c))


def defect_quadratics(p, conv: Conventions | None = None) -> list[tuple[float, float, float]]:
    """Each real and imaginary part of each defect entry as (a, b, c): a lam^2 + b lam + c."""
    p = ModelParams.coerce(p)
    conv = conv if conv is not None else calibrate_conventions()
    cd, _, a, Gam = _parts(p, conv)
    b = cd.brackets
    out = []
    for i, j, k in CYCLIC:
        q2 = a[i] @ a[j] - a[j] @ a[i]
        q1 = -(a[i] @ Gam[j] - Gam[j] @ a[i]) - (Gam[i] @ a[j] - a[j] @ Gam[i]) + b[k] * a[k]
        q0 = Gam[i] @ Gam[j] - Gam[j] @ Gam[i] - b[k] * Gam[k]
        for part in (np.real, np.imag):
            for x, y in itertools.product(range(2), range(2)):
                out.append((float(part(q2)[x, y]), float(part(q1)[x, y]), float(part(q0)[x, y])))
    return out


def solve_wk_numbers(p, conv: Conventions | None = None,
                     tol: float = DEFAULT_TOLERANCES.root_cluster_tol) -> list[float]:
    """All lam making the WK system flat at p.

    Works on p/|p| (where ``tol`` applies) and rescales: lam(mu p) = mu lam(p).
    """
    p = ModelParams.coerce(p)
    n = p.norm()
    if n == 0.0:
        raise ZeroScalarCurvature("zero parameters")
    q = p.scaled(1.0 / n)
    if curvature(q).S == 0.0:
        raise ZeroScalarCurvature("scalar curvature vanishes")
    roots = common_real_roots(defect_quadratics(q, conv), tol)
    return [n * r for r in roots]


# ---------------------------------------------------------------- calibration


def _calibration_passes(conv: Conventions, tol: ToleranceConfig) -> bool:
    p = SASAKI_PLUS
    try:
        lams = solve_wk_numbers(p, conv, tol.root_cluster_tol)
    except WKError:
        return False
    if len(lams) != 1:
        return False
    lam = lams[0]
    if int(math.copysign(1, lam)) != expected_lambda_sign(p):
        return False
    W = wk_connection_matrices(p, lam, conv)
    return integrability_defect(W, curvature(p)) < tol.defect_tol * p.norm() ** 2


def enumerate_conventions(tol: ToleranceConfig = DEFAULT_TOLERANCES) -> list[tuple[Conventions, bool]]:
    combos = itertools.product((1, -1), (1, -1), (1, -1))
    return [(Conventions(cs, ss, o), _calibration_passes(Conventions(cs, ss, o), tol))
            for cs, ss, o in combos]


@functools.lru_cache(maxsize=None)
def calibrate_conventions(clifford_sign: int = 1) -> Conventions:
    """Fix spin-connection sign and orientation on the Sasakian fixture.

    The fixture must admit a flat WK system for exactly one lam, whose sign follows
    the sign rule. Representations with equal volume element are unitarily
    equivalent, so the enumeration must single out exactly one combination per
    Clifford sign, with both sharing spin sign and orientation.
    """
    table = enumerate_conventions()
    passing = [c for c, ok in table if ok]
    per_sign = [c for c in passing if c.clifford_sign == clifford_sign]
    classes = {(c.spin_sign, c.orientation) for c in passing}
    if len(per_sign) != 1 or len(classes) != 1:
        raise CalibrationFailed(f"passing combinations: {passing}")
    return per_sign[0]


# ---------------------------------------------------------------- solutions


@dataclass(frozen=True)
class SolutionSpace:
    dim: int
    basis: tuple


def spinor_solution_space(W: WKConnection, c: CurvatureData, tol: float) -> SolutionSpace:
    """Dimension and basis of initial values of global solutions.

    Flat system: everything. Otherwise a solution value must lie in the common
    kernel of the defect matrices, and that kernel must be invariant under all C_k.
    """
    if integrability_defect(W, c) < tol:
        return SolutionSpace(2, (np.array([1, 0], complex), np.array([0, 1], complex)))
    stack = np.vstack(defect_matrices(W, c))
    _, sv, vh = np.linalg.svd(stack)
    ker = [vh[i].conj() for i in range(2) if sv[i] < tol]
    if len(ker) == 1:
        v = ker[0]
        for Ck in W.C:
            w = Ck @ v
            if np.linalg.norm(w - np.vdot(v, w) * v) >= tol:
                ker = []
                break
    return SolutionSpace(len(ker), tuple(ker))


def integrate_spinor(W: WKConnection, path: Iterable[tuple[int, float]], psi0,
                     step: float = DEFAULT_TOLERANCES.ode_step) -> list[np.ndarray]:
    """Transport psi along a piecewise path of frame flows.

    ``path`` is a list of (direction, duration) with direction in +/-1, +/-2, +/-3
    meaning the flow of +/-e_k.
    """
    traj = [np.asarray(psi0, dtype=complex)]
    for direction, duration in path:
        k = abs(int(direction))
        if k not in (1, 2, 3) or duration < 0:
            raise ValueError(f"bad path segment {(direction, duration)}")
        f = W.C[k - 1] if direction > 0 else -W.C[k - 1]
        traj.extend(rk4_integrate(f, traj[-1], duration, step)[1:])
    return traj


def commutator_loop(t: float, b3: float) -> list[tuple[int, float]]:
    """e1, e2, -e1, -e2 for time t, closed to second order by a flow along e3."""
    corr = -b3 * t * t
    return [(1, t), (2, t), (-1, t), (-2, t), (3 if corr >= 0 else -3, abs(corr))]


def holonomy_defect(W: WKConnection, c: CurvatureData, t: float, psi0=None,
                    step: float = DEFAULT_TOLERANCES.ode_step) -> float:
    psi0 = np.array([1, 0], complex) if psi0 is None else np.asarray(psi0, complex)
    end = integrate_spinor(W, commutator_loop(t, c.b3), psi0, step)[-1]
    return float(np.linalg.norm(end - psi0) / np.linalg.norm(psi0))


def norm_drift(traj: Sequence[np.ndarray]) -> float:
    n0 = float(np.vdot(traj[0], traj[0]).real)
    return max(abs(float(np.vdot(x, x).real) - n0) for x in traj) / n0


# ---------------------------------------------------------------- Einstein-Dirac


def energy_momentum(W: WKConnection, psi) -> np.ndarray:
    """T_ij = Re( gamma_i A_j psi + gamma_j A_i psi, psi ) for a WK solution value psi."""
    psi = np.asarray(psi, complex)
    g, A = W.rep, W.A
    T = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            T[i, j] = pair(g[i] @ (A[j] @ psi) + g[j] @ (A[i] @ psi), psi).real
    return T


def normalize_spinor(psi_star, S: float, lam: float) -> np.ndarray:
    """Rescale to |psi|^2 = (n-2)|S|/|lam| with n = 3."""
    psi_star = np.asarray(psi_star, complex)
    if lam == 0.0:
        raise ZeroLambda("lam = 0")
    nsq = float(np.vdot(psi_star, psi_star).real)
    if nsq == 0.0:
        raise ZeroSpinor("zero spinor")
    return math.sqrt((DIM - 2) * abs(S) / (abs(lam) * nsq)) * psi_star


def einstein_dirac_residual(c: CurvatureData, T: np.ndarray) -> tuple[float, Branch]:
    """min over the sign of max |Ric - S/2 g -/+ T/4|, with the achieving sign."""
    E = np.diag(c.ricci) - 0.5 * c.S * np.eye(3)
    plus = float(np.abs(E - 0.25 * T).max())
    minus = float(np.abs(E + 0.25 * T).max())
    return (plus, Branch.PLUS) if plus <= minus else (minus, Branch.MINUS)


def dirac_eigen_residual(W: WKConnection, psi) -> float:
    psi = np.asarray(psi, complex)
    Dpsi = sum(W.rep[i] @ (W.A[i] @ psi) for i in range(3))
    return float(np.linalg.norm(Dpsi - W.lam * psi))


# ---------------------------------------------------------------- pipeline

HOLONOMY_T = 0.025
NORM_PATH = ((1, 1.0 / 3.0), (2, 1.0 / 3.0), (3, 1.0 / 3.0))


@dataclass
class EDReport:
    params: ModelParams
    normalized: ModelParams
    variety_residual: float
    scalar_curvature: float | None = None
    lambda_theorem: float | None = None
    lambda_theorem_branch: str | None = None
    lambda_theorem_error: str | None = None
    lambda_solved: list = field(default_factory=list)
    lambda_used: float | None = None
    theorem_lambda_mismatch: float | None = None
    integrability_defect: float | None = None
    spinor_space_dim: int = 0
    einstein_dirac_residual: float | None = None
    ed_sign: str | None = None
    dirac_residual: float | None = None
    norm_drift: float | None = None
    holonomy_defect: float | None = None
    holonomy_order: float | None = None
    verdict: str = "Fail"
    reasons: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "Pass"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = [self.params.K, self.params.L, self.params.M]
        d["normalized"] = [self.normalized.K, self.normalized.L, self.normalized.M]
        return d


def verify(p, tol: ToleranceConfig = DEFAULT_TOLERANCES,
           conv: Conventions | None = None) -> EDReport:
    """Run the full existence and Einstein-Dirac check at p.

    Residuals are evaluated at the homothety-normalized point p/|p|; lam values are
    reported for p itself. Errors of the closed lam formula are recorded but do not
    decide the verdict; existence is decided by the flatness of the WK system.
    """
    p = ModelParams.coerce(p)
    if not p.is_finite() or p.is_zero():
        raise ValueError(f"invalid parameters {p}")
    conv = conv if conv is not None else calibrate_conventions()
    n = p.norm()
    q = p.scaled(1.0 / n)
    cd = curvature(q)
    rep = EDReport(params=p, normalized=q, variety_residual=abs(variety_F(p)))
    rep.scalar_curvature = curvature(p).S
    fail = rep.reasons.append

    if abs(variety_F(q)) > tol.residual_tol:
        fail(f"OffVariety: |F(p/|p|)| = {abs(variety_F(q)):.3e}")
    try:
        th = wk_number(p)
        rep.lambda_theorem, rep.lambda_theorem_branch = th.value, th.branch.value
    except WKError as e:
        rep.lambda_theorem_error = type(e).__name__
    if abs(cd.S) <= tol.residual_tol:
        fail("ZeroScalarCurvature")
        return rep

    try:
        rep.lambda_solved = solve_wk_numbers(p, conv, tol.root_cluster_tol)
    except NoCommonRoot:
        fail("NoCommonRoot: no lam makes the WK system flat")
    if len(rep.lambda_solved) > 1:
        fail(f"NonUnique: {len(rep.lambda_solved)} WK-numbers")

    if rep.lambda_solved:
        lam_p = rep.lambda_solved[0]
    elif rep.lambda_theorem is not None:
        lam_p = rep.lambda_theorem
        rep.notes.append("diagnostics use the closed-form lam")
    else:
        return rep
    rep.lambda_used = lam_p
    if rep.lambda_theorem is not None and rep.lambda_solved:
        rep.theorem_lambda_mismatch = abs(lam_p - rep.lambda_theorem)
        if rep.theorem_lambda_mismatch > tol.root_cluster_tol * max(1.0, abs(lam_p)):
            rep.notes.append("solved lam differs from the closed-form lam")
    lam = lam_p / n

    W = wk_connection_matrices(q, lam, conv)
    rep.integrability_defect = integrability_defect(W, cd)
    space = spinor_solution_space(W, cd, tol.defect_tol)
    rep.spinor_space_dim = space.dim
    if rep.integrability_defect >= tol.defect_tol:
        fail(f"Integrability: defect {rep.integrability_defect:.3e}")
    if space.dim != 2:
        fail(f"SolutionSpace: dimension {space.dim}")
    if lam == 0.0:
        fail("ZeroLambda")
        return rep

    psi = normalize_spinor(space.basis[0] if space.basis else np.array([1, 0], complex), cd.S, lam)
    T = energy_momentum(W, psi)
    rep.einstein_dirac_residual, sign = einstein_dirac_residual(cd, T)
    rep.ed_sign = sign.value
    rep.dirac_residual = dirac_eigen_residual(W, psi)
    if rep.einstein_dirac_residual >= tol.residual_tol:
        fail(f"EinsteinDirac: residual {rep.einstein_dirac_residual:.3e}")
    if rep.dirac_residual >= tol.residual_tol:
        fail(f"Dirac: residual {rep.dirac_residual:.3e}")

    rep.norm_drift = norm_drift(integrate_spinor(W, NORM_PATH, psi, tol.ode_step))
    if rep.norm_drift >= 1e-8:
        fail(f"NormDrift: {rep.norm_drift:.3e}")
    h1 = holonomy_defect(W, cd, HOLONOMY_T, psi, tol.ode_step)
    h2 = holonomy_defect(W, cd, HOLONOMY_T / 2, psi, tol.ode_step)
    rep.holonomy_defect = h1
    rep.holonomy_order = math.log2(h1 / h2) if h1 > 1e-12 and h2 > 0 else None
    if rep.holonomy_order is not None and rep.holonomy_order < 2.5:
        fail(f"Holonomy: loop defect shrinks like t^{rep.holonomy_order:.2f}")

    if not rep.reasons:
        rep.verdict = "Pass"
    return rep
