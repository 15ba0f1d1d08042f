"""Complex spin representation in dimension three on two-component spinors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class CliffordRep:
    gammas: tuple[np.ndarray, np.ndarray, np.ndarray]
    sign_choice: int
    orientation: int

    def __getitem__(self, k: int) -> np.ndarray:
        return self.gammas[k]

    def volume(self) -> np.ndarray:
        g1, g2, g3 = self.gammas
        return g1 @ g2 @ g3


def build_rep(sign_choice: int = 1, orientation: int = 1) -> CliffordRep:
    """gamma_k = sign_choice * i * sigma_k, with gamma_1 <-> gamma_2 swapped when needed
    so that gamma_1 gamma_2 gamma_3 = orientation * Id.

    Since (i sigma_1)(i sigma_2)(i sigma_3) = Id, negating all three flips the volume
    element; the swap restores the requested orientation. Hence (s, o) and (-s, -o)
    differ by an overall sign only.
    """
    if sign_choice not in (1, -1) or orientation not in (1, -1):
        raise ValueError("sign_choice and orientation must be +1 or -1")
    g = [sign_choice * 1j * s for s in _PAULI]
    if sign_choice != orientation:
        g[0], g[1] = g[1], g[0]
    for m in g:
        m.setflags(write=False)
    return CliffordRep(tuple(g), sign_choice, orientation)


def clifford_of_vector(rep: CliffordRep, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v[0] * rep[0] + v[1] * rep[1] + v[2] * rep[2]


def pair(phi, psi) -> complex:
    """Hermitian product, conjugate-linear in the second slot."""
    return complex(np.vdot(psi, phi))


def spinor(z1: complex, z2: complex) -> np.ndarray:
    return np.array([z1, z2], dtype=complex)
