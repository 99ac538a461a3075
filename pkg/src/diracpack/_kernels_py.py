"""Pure-numpy fallback for the compiled stencil kernels.

Same contracts as diracpack._kernels: ghost-padded (4, nx+2, ny+2, nz+2)
arrays, interior-only updates, zero shell as the reflecting closure.
"""

import numpy as np


def backend():
    return "numpy"


def _h_interior(psi, inv2dx, inv2dy, inv2dz):
    c = (slice(1, -1),)
    dx = (psi[:, 2:, 1:-1, 1:-1] - psi[:, :-2, 1:-1, 1:-1]) * inv2dx
    dy = (psi[:, 1:-1, 2:, 1:-1] - psi[:, 1:-1, :-2, 1:-1]) * inv2dy
    dz = (psi[:, 1:-1, 1:-1, 2:] - psi[:, 1:-1, 1:-1, :-2]) * inv2dz
    v = psi[:, 1:-1, 1:-1, 1:-1]
    out = np.empty_like(v)
    out[0] = -1j * dx[3] - dy[3] - 1j * dz[2] + v[0]
    out[1] = -1j * dx[2] + dy[2] + 1j * dz[3] + v[1]
    out[2] = -1j * dx[1] - dy[1] - 1j * dz[0] - v[2]
    out[3] = -1j * dx[0] + dy[0] + 1j * dz[1] - v[3]
    return out


def hamiltonian_apply(psi, out, inv2dx, inv2dy, inv2dz):
    out[:, 1:-1, 1:-1, 1:-1] = _h_interior(psi, inv2dx, inv2dy, inv2dz)


def leapfrog_combine(prev, curr, two_dt, inv2dx, inv2dy, inv2dz):
    prev[:, 1:-1, 1:-1, 1:-1] -= (1j * two_dt) * _h_interior(
        curr, inv2dx, inv2dy, inv2dz)


def norm_interior(psi, cell_volume):
    v = psi[:, 1:-1, 1:-1, 1:-1]
    return float(np.sum(v.real**2 + v.imag**2) * cell_volume)
