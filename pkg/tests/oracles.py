"""Independent oracles used only by the tests."""

from fractions import Fraction

import numpy as np


def _trim(p):
    while len(p) > 1 and p[0] == 0:
        p = p[1:]
    return p


def _polyrem(a, b):
    a = list(a)
    while len(a) >= len(b) and any(a):
        f = a[0] / b[0]
        for i in range(len(b)):
            a[i] -= f * b[i]
        a = a[1:]
    return _trim(a) if a else [Fraction(0)]


def _deriv(p):
    n = len(p) - 1
    return [c * (n - i) for i, c in enumerate(p[:-1])]


def _eval(p, x):
    acc = Fraction(0)
    for c in p:
        acc = acc * x + c
    return acc


def sturm_chain(coeffs):
    p = _trim([Fraction(c) for c in coeffs])
    chain = [p, _trim(_deriv(p))]
    while len(chain[-1]) > 1 or chain[-1][0] != 0:
        r = _polyrem(chain[-2], chain[-1])
        if r == [0] or all(c == 0 for c in r):
            break
        chain.append([-c for c in r])
        if len(chain[-1]) == 1:
            break
    return chain


def _sign_changes(chain, x):
    signs = [v for v in (_eval(p, x) for p in chain) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def sturm_roots(coeffs, tol=1e-13):
    """Distinct real roots of a polynomial (descending float coefficients), exact Sturm
    counting plus bisection on Fractions."""
    p = _trim([Fraction(c) for c in coeffs])
    if len(p) == 1:
        return []
    bound = 1 + max(abs(c / p[0]) for c in p[1:])
    chain = sturm_chain(p)
    out = []

    def isolate(lo, hi):
        n = _sign_changes(chain, lo) - _sign_changes(chain, hi)
        if n == 0:
            return
        if n == 1 or hi - lo < Fraction(tol):
            while hi - lo > Fraction(tol) * max(1, abs(lo)):
                mid = (lo + hi) / 2
                if _sign_changes(chain, lo) - _sign_changes(chain, mid) >= 1:
                    hi = mid
                else:
                    lo = mid
            out.append(float((lo + hi) / 2))
            return
        mid = (lo + hi) / 2
        if _eval(p, mid) == 0:
            out.append(float(mid))
            mid += Fraction(tol) / 7
        isolate(lo, mid)
        isolate(mid, hi)

    isolate(-bound - 1, bound + 1)
    return sorted(out)


def central_grad(f, x, h=1e-6):
    x = np.asarray(x, float)
    return np.array([(f(x + h * e) - f(x - h * e)) / (2 * h) for e in np.eye(3)])
