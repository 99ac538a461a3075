"""Dirac matrix algebra and free-particle spinors (natural units).

Conventions: Dirac representation, bispinor ordering (upper pair, lower
pair).  alpha_i have the Pauli matrices on the off-diagonal blocks, beta is
diag(I, -I), Sigma_i = diag(sigma_i, sigma_i).  Branches 1, 2 carry energy
+lambda_p, branches 3, 4 carry -lambda_p, with

    lambda_p = sqrt(p^2 + 1),  gamma = 1/(lambda_p + 1),
    N = sqrt((lambda_p + 1) / (2 lambda_p)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)
_Z2 = np.zeros((2, 2), dtype=np.complex128)

ALPHA_X = np.block([[_Z2, _SX], [_SX, _Z2]])
ALPHA_Y = np.block([[_Z2, _SY], [_SY, _Z2]])
ALPHA_Z = np.block([[_Z2, _SZ], [_SZ, _Z2]])
BETA = np.block([[_I2, _Z2], [_Z2, -_I2]])
SIGMA_X = np.block([[_SX, _Z2], [_Z2, _SX]])
SIGMA_Y = np.block([[_SY, _Z2], [_Z2, _SY]])
SIGMA_Z = np.block([[_SZ, _Z2], [_Z2, _SZ]])

ALPHA = (ALPHA_X, ALPHA_Y, ALPHA_Z)
SIGMA = (SIGMA_X, SIGMA_Y, SIGMA_Z)

for _m in (*ALPHA, BETA, *SIGMA):
    _m.setflags(write=False)

AXES = {"x": 0, "y": 1, "z": 2}


def energy(p) -> float:
    """Positive branch energy lambda_p = sqrt(p^2 + 1) in units of m c^2."""
    p = np.asarray(p, dtype=float)
    return float(np.sqrt(1.0 + p @ p))


def hamiltonian_matrix(p) -> np.ndarray:
    """4x4 momentum-space Hamiltonian alpha.p + beta."""
    p = np.asarray(p, dtype=float)
    return p[0] * ALPHA_X + p[1] * ALPHA_Y + p[2] * ALPHA_Z + BETA


@dataclass(frozen=True)
class FreeSpinor:
    """One branch of the free-particle eigenbasis at momentum p."""

    branch: int          # 1..4; 1,2 -> +lambda_p, 3,4 -> -lambda_p
    p: tuple
    u: np.ndarray        # unit-normalized bispinor
    gamma_p: float
    n_p: float

    @property
    def energy_sign(self) -> int:
        return 1 if self.branch in (1, 2) else -1


def free_spinor(branch: int, p) -> FreeSpinor:
    """Free Dirac spinor U_r(p), unit-normalized.

    branch 1: (1, 0, p3*g, (p1+ip2)*g)      +lambda
    branch 2: (0, 1, (p1-ip2)*g, -p3*g)     +lambda
    branch 3: (-p3*g, -(p1+ip2)*g, 1, 0)    -lambda
    branch 4: (-(p1-ip2)*g, p3*g, 0, 1)     -lambda
    with g = gamma = 1/(lambda+1) and overall factor N.
    """
    if branch not in (1, 2, 3, 4):
        raise ValueError(f"branch must be 1..4, got {branch}")
    p = np.asarray(p, dtype=float)
    p1, p2, p3 = p
    lam = energy(p)
    g = 1.0 / (lam + 1.0)
    n = np.sqrt((lam + 1.0) / (2.0 * lam))
    if branch == 1:
        u = np.array([1.0, 0.0, p3 * g, (p1 + 1j * p2) * g])
    elif branch == 2:
        u = np.array([0.0, 1.0, (p1 - 1j * p2) * g, -p3 * g])
    elif branch == 3:
        u = np.array([-p3 * g, -(p1 + 1j * p2) * g, 1.0, 0.0])
    else:
        u = np.array([-(p1 - 1j * p2) * g, p3 * g, 0.0, 1.0])
    u = n * u.astype(np.complex128)
    return FreeSpinor(branch, (p1, p2, p3), u, g, n)


def project_coefficients(phi, p) -> np.ndarray:
    """Expansion coefficients C_r = U_r(p)^dag phi_hat of a polarization.

    phi is normalized internally (A = 1/sqrt(sum |phi_i|^2)); the momentum
    envelope f(p) is factored out, so sum_r |C_r|^2 = 1.
    """
    phi = np.asarray(phi, dtype=np.complex128)
    nrm = np.linalg.norm(phi)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ValueError("polarization must have finite nonzero norm")
    phi = phi / nrm
    return np.array([free_spinor(r, p).u.conj() @ phi for r in (1, 2, 3, 4)])


def apply_matrix(m, s) -> np.ndarray:
    """Matrix-vector product on a bispinor."""
    return np.asarray(m) @ np.asarray(s, dtype=np.complex128)


def velocity_matrix_element(i: int, j: int, axis: str, p) -> complex:
    """U_i(p)^dag alpha_mu U_j(p), computed by explicit matrix algebra.

    Within one energy class it equals +/- p_mu/lambda_p * delta_ij; the
    explicit computation doubles as a check of that closed form.
    """
    mu = AXES[axis] if isinstance(axis, str) else int(axis)
    ui = free_spinor(i, p).u
    uj = free_spinor(j, p).u
    return complex(ui.conj() @ (ALPHA[mu] @ uj))
