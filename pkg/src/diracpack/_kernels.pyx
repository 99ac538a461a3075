# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: initializedcheck=False, language_level=3
"""Compiled stencil kernels for the leap-frog grid integrator.

All arrays are ghost-padded: shape (4, nx+2, ny+2, nz+2) with a zero shell
so the reflecting (hard-wall) closure needs no branches.  The update is
data-parallel over x-slabs; norm reductions accumulate per-slab partials
that are summed in index order, so results are independent of the thread
count.
"""

import numpy as np

cimport numpy as cnp
from cython.parallel import prange

ctypedef double complex cplx


def backend():
    return "cython"


def hamiltonian_apply(cplx[:, :, :, ::1] psi, cplx[:, :, :, ::1] out,
                      double inv2dx, double inv2dy, double inv2dz):
    """out <- (-i alpha.grad + beta) psi on the interior nodes."""
    cdef Py_ssize_t X = psi.shape[1], Y = psi.shape[2], Z = psi.shape[3]
    cdef Py_ssize_t i, j, k
    cdef cplx dx0, dx1, dx2, dx3, dy0, dy1, dy2, dy3, dz0, dz1, dz2, dz3
    cdef cplx J = 1j
    with nogil:
        for i in prange(1, X - 1, schedule='static'):
            for j in range(1, Y - 1):
                for k in range(1, Z - 1):
                    dx0 = (psi[0, i + 1, j, k] - psi[0, i - 1, j, k]) * inv2dx
                    dx1 = (psi[1, i + 1, j, k] - psi[1, i - 1, j, k]) * inv2dx
                    dx2 = (psi[2, i + 1, j, k] - psi[2, i - 1, j, k]) * inv2dx
                    dx3 = (psi[3, i + 1, j, k] - psi[3, i - 1, j, k]) * inv2dx
                    dy0 = (psi[0, i, j + 1, k] - psi[0, i, j - 1, k]) * inv2dy
                    dy1 = (psi[1, i, j + 1, k] - psi[1, i, j - 1, k]) * inv2dy
                    dy2 = (psi[2, i, j + 1, k] - psi[2, i, j - 1, k]) * inv2dy
                    dy3 = (psi[3, i, j + 1, k] - psi[3, i, j - 1, k]) * inv2dy
                    dz0 = (psi[0, i, j, k + 1] - psi[0, i, j, k - 1]) * inv2dz
                    dz1 = (psi[1, i, j, k + 1] - psi[1, i, j, k - 1]) * inv2dz
                    dz2 = (psi[2, i, j, k + 1] - psi[2, i, j, k - 1]) * inv2dz
                    dz3 = (psi[3, i, j, k + 1] - psi[3, i, j, k - 1]) * inv2dz
                    out[0, i, j, k] = -J * dx3 - dy3 - J * dz2 + psi[0, i, j, k]
                    out[1, i, j, k] = -J * dx2 + dy2 + J * dz3 + psi[1, i, j, k]
                    out[2, i, j, k] = -J * dx1 - dy1 - J * dz0 - psi[2, i, j, k]
                    out[3, i, j, k] = -J * dx0 + dy0 + J * dz1 - psi[3, i, j, k]


def leapfrog_combine(cplx[:, :, :, ::1] prev, cplx[:, :, :, ::1] curr,
                     double two_dt,
                     double inv2dx, double inv2dy, double inv2dz):
    """prev <- prev - 2 i dt H(curr) on the interior (two-level update)."""
    cdef Py_ssize_t X = curr.shape[1], Y = curr.shape[2], Z = curr.shape[3]
    cdef Py_ssize_t i, j, k
    cdef cplx dx0, dx1, dx2, dx3, dy0, dy1, dy2, dy3, dz0, dz1, dz2, dz3
    cdef cplx h0, h1, h2, h3
    cdef cplx J = 1j
    cdef cplx m2idt = -1j * two_dt
    with nogil:
        for i in prange(1, X - 1, schedule='static'):
            for j in range(1, Y - 1):
                for k in range(1, Z - 1):
                    dx0 = (curr[0, i + 1, j, k] - curr[0, i - 1, j, k]) * inv2dx
                    dx1 = (curr[1, i + 1, j, k] - curr[1, i - 1, j, k]) * inv2dx
                    dx2 = (curr[2, i + 1, j, k] - curr[2, i - 1, j, k]) * inv2dx
                    dx3 = (curr[3, i + 1, j, k] - curr[3, i - 1, j, k]) * inv2dx
                    dy0 = (curr[0, i, j + 1, k] - curr[0, i, j - 1, k]) * inv2dy
                    dy1 = (curr[1, i, j + 1, k] - curr[1, i, j - 1, k]) * inv2dy
                    dy2 = (curr[2, i, j + 1, k] - curr[2, i, j - 1, k]) * inv2dy
                    dy3 = (curr[3, i, j + 1, k] - curr[3, i, j - 1, k]) * inv2dy
                    dz0 = (curr[0, i, j, k + 1] - curr[0, i, j, k - 1]) * inv2dz
                    dz1 = (curr[1, i, j, k + 1] - curr[1, i, j, k - 1]) * inv2dz
                    dz2 = (curr[2, i, j, k + 1] - curr[2, i, j, k - 1]) * inv2dz
                    dz3 = (curr[3, i, j, k + 1] - curr[3, i, j, k - 1]) * inv2dz
                    h0 = -J * dx3 - dy3 - J * dz2 + curr[0, i, j, k]
                    h1 = -J * dx2 + dy2 + J * dz3 + curr[1, i, j, k]
                    h2 = -J * dx1 - dy1 - J * dz0 - curr[2, i, j, k]
                    h3 = -J * dx0 + dy0 + J * dz1 - curr[3, i, j, k]
                    prev[0, i, j, k] = prev[0, i, j, k] + m2idt * h0
                    prev[1, i, j, k] = prev[1, i, j, k] + m2idt * h1
                    prev[2, i, j, k] = prev[2, i, j, k] + m2idt * h2
                    prev[3, i, j, k] = prev[3, i, j, k] + m2idt * h3


def norm_interior(cplx[:, :, :, ::1] psi, double cell_volume):
    """sum |psi|^2 * cell_volume over the interior, slab-deterministic."""
    cdef Py_ssize_t X = psi.shape[1], Y = psi.shape[2], Z = psi.shape[3]
    cdef Py_ssize_t c, i, j, k
    cdef double acc
    cdef cplx v
    partials = np.zeros(X, dtype=np.float64)
    cdef double[::1] part = partials
    with nogil:
        for i in prange(1, X - 1, schedule='static'):
            acc = 0.0
            for c in range(4):
                for j in range(1, Y - 1):
                    for k in range(1, Z - 1):
                        v = psi[c, i, j, k]
                        acc = acc + v.real * v.real + v.imag * v.imag
            part[i] = acc
    return float(partials.sum() * cell_volume)
