"""Small numerical kernels: polynomial roots, root clustering, RK4 for linear systems."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Sequence

import numpy as np

from .errors import IdenticallyZero, NoCommonRoot

# leading coefficients below this fraction of the largest one are treated as zero
DEGREE_DROP_REL = 1e-12


@dataclass(frozen=True)
class ToleranceConfig:
    defect_tol: float = 1e-10
    residual_tol: float = 1e-9
    root_cluster_tol: float = 1e-8
    ode_step: float = 1e-3
    trace_polish_tol: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{f.name} must be positive and finite, got {v!r}")

    def with_overrides(self, **kw) -> "ToleranceConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOLERANCES = ToleranceConfig()


@dataclass(frozen=True)
class CubicCoeffs:
    a3: float
    a2: float
    a1: float
    a0: float

    def __call__(self, x: float) -> float:
        return ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0

    def deriv(self, x: float) -> float:
        return (3.0 * self.a3 * x + 2.0 * self.a2) * x + self.a1


def _newton_polish(c: CubicCoeffs, x: float, iters: int = 3) -> float:
    for _ in range(iters):
        d = c.deriv(x)
        if d == 0.0:
            break
        step = c(x) / d
        xn = x - step
        if not math.isfinite(xn) or abs(c(xn)) >= abs(c(x)):
            break
        x = xn
    return x


def real_roots_quadratic(a: float, b: float, c: float) -> list[float]:
    """Real roots of a*x^2 + b*x + c, ascending, repeated for double roots.

    Leading coefficients that are negligible relative to the largest one drop the
    degree. A slightly negative discriminant (rounding level) is read as a double root.
    """
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0.0:
        raise IdenticallyZero("all coefficients vanish")
    if abs(a) <= DEGREE_DROP_REL * scale:
        if abs(b) <= DEGREE_DROP_REL * scale:
            return []
        return [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        if -disc <= 1e-12 * (b * b + abs(4.0 * a * c)):
            x = -b / (2.0 * a)
            return [x, x]
        return []
    sq = math.sqrt(disc)
    # cancellation-free pairing
    q = -0.5 * (b + math.copysign(sq, b))
    r1 = q / a
    r2 = c / q if q != 0.0 else r1
    return sorted([r1, r2])


def _depressed_cubic_roots(c: CubicCoeffs) -> list[float]:
    a = c.a2 / c.a3
    b = c.a1 / c.a3
    d = c.a0 / c.a3
    shift = a / 3.0
    p = b - a * a / 3.0
    q = 2.0 * a**3 / 27.0 - a * b / 3.0 + d
    if p == 0.0 and q == 0.0:
        return [-shift] * 3
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    scale = (q / 2.0) ** 2 + abs(p / 3.0) ** 3
    if abs(disc) <= 1e-14 * scale:
        # double root plus a simple one
        u = math.copysign(abs(q / 2.0) ** (1.0 / 3.0), -q)
        return sorted([2.0 * u - shift, -u - shift, -u - shift])
    if disc > 0.0:
        sq = math.sqrt(disc)
        w = -q / 2.0 + math.copysign(sq, -q)
        u = math.copysign(abs(w) ** (1.0 / 3.0), w)
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        return [u + v - shift]
    # three distinct real roots, trigonometric form
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
    return sorted(m * math.cos(theta - 2.0 * math.pi * k / 3.0) - shift for k in range(3))


def real_roots_cubic(c: CubicCoeffs) -> list[float]:
    """All real roots of a3 x^3 + a2 x^2 + a1 x + a0, ascending, with multiplicity."""
    coeffs = (c.a3, c.a2, c.a1, c.a0)
    if not all(math.isfinite(v) for v in coeffs):
        raise ValueError("non-finite coefficient")
    scale = max(abs(v) for v in coeffs)
    if scale == 0.0:
        raise IdenticallyZero("all coefficients vanish")
    if abs(c.a3) <= DEGREE_DROP_REL * scale:
        roots = real_roots_quadratic(0.0 if abs(c.a2) <= DEGREE_DROP_REL * scale else c.a2,
                                     c.a1, c.a0)
        c = CubicCoeffs(0.0, c.a2, c.a1, c.a0)
    else:
        roots = _depressed_cubic_roots(c)
    return sorted(_newton_polish(c, r) for r in roots)


def common_real_roots(polys: Sequence[Sequence[float]], tol: float) -> list[float]:
    """Real numbers that are roots of every nontrivial quadratic in ``polys``.

    Each entry is an (a, b, c) triple for a*x^2 + b*x + c. Polynomials whose
    coefficients are all below 1e-12 of the global coefficient scale are ignored.
    Roots are matched across polynomials within ``tol * max(1, |x|)``.
    """
    polys = [tuple(float(v) for v in p) for p in polys]
    scale = max((abs(v) for p in polys for v in p), default=0.0)
    if scale == 0.0:
        raise IdenticallyZero("no nontrivial polynomial")
    live = [p for p in polys if max(abs(v) for v in p) > DEGREE_DROP_REL * scale]
    root_sets = []
    for a, b, c in live:
        # a polynomial with no root-carrying degree left (constant) cannot vanish
        rs = real_roots_quadratic(a, b, c)
        if not rs:
            raise NoCommonRoot("a nontrivial polynomial has no real root")
        root_sets.append(rs)
    anchor = min(root_sets, key=len)
    found: list[float] = []
    for cand in anchor:
        matched = [cand]
        for rs in root_sets:
            near = [r for r in rs if abs(r - cand) <= tol * max(1.0, abs(cand))]
            if not near:
                break
            matched.append(min(near, key=lambda r: abs(r - cand)))
        else:
            centre = float(np.mean(matched))
            if not any(abs(centre - f) <= tol * max(1.0, abs(f)) for f in found):
                found.append(centre)
    if not found:
        raise NoCommonRoot("no root shared by all polynomials")
    return sorted(found)


def rk4_step(f: np.ndarray, psi: np.ndarray, h: float) -> np.ndarray:
    """One classical Runge-Kutta step for the linear system psi' = f @ psi."""
    if h <= 0:
        raise ValueError("step must be positive")
    k1 = f @ psi
    k2 = f @ (psi + 0.5 * h * k1)
    k3 = f @ (psi + 0.5 * h * k2)
    k4 = f @ (psi + h * k3)
    return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_integrate(f: np.ndarray, psi: np.ndarray, duration: float, h: float) -> list[np.ndarray]:
    """Integrate psi' = f @ psi over ``duration`` with fixed steps (last step shortened)."""
    out = [np.asarray(psi, dtype=complex)]
    if duration <= 0:
        return out
    n = int(math.ceil(duration / h - 1e-9))
    step = duration / n
    cur = out[0]
    for _ in range(n):
        cur = rk4_step(f, cur, step)
        out.append(cur)
    return out
