#!/usr/bin/env python3
"""Benchmark the compiled stencil kernels against the numpy fallback.

Runs the fused leap-frog update and the norm reduction on a cubic grid
and reports per-step times, node-update throughput, and the speedup.
Also cross-checks that both backends produce the same field (they share
semantics; instruction ordering differs, so agreement is ~1e-15).

Usage: python benchmarks/bench_kernels.py [--n 64] [--steps 50]
"""

import argparse
import time

import numpy as np

from diracpack import _kernels_py
from diracpack.fdtd import default_dt
from diracpack.grid import PositionGrid
from diracpack.packet import GaussianPacket, axial_state, initial_bispinor_field

try:
    from diracpack import _kernels
    HAVE_EXT = True
except ImportError:
    HAVE_EXT = False


def bench(impl, pad0, pad1, n_steps, two_dt, inv2d, cell):
    prev = pad0.copy()
    curr = pad1.copy()
    t0 = time.perf_counter()
    for _ in range(n_steps):
        impl.leapfrog_combine(prev, curr, two_dt, *inv2d)
        prev, curr = curr, prev
    t_step = (time.perf_counter() - t0) / n_steps
    t0 = time.perf_counter()
    for _ in range(n_steps):
        nrm = impl.norm_interior(curr, cell)
    t_norm = (time.perf_counter() - t0) / n_steps
    return t_step, t_norm, nrm, curr


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--steps", type=int, default=50)
    ap.add_argument("--spacing", type=float, default=0.4)
    args = ap.parse_args()

    grid = PositionGrid.cubic(args.n, args.spacing)
    state = axial_state(GaussianPacket(args.n * args.spacing / 8.0,
                                       args.n * args.spacing / 8.0))
    f0 = initial_bispinor_field(state, grid, normalize=True)
    dt = default_dt(grid)
    pad = np.zeros((4, args.n + 2, args.n + 2, args.n + 2),
                   dtype=np.complex128)
    pad[:, 1:-1, 1:-1, 1:-1] = f0.values
    inv2d = tuple(1.0 / (2.0 * d) for d in grid.spacing)
    nodes = args.n ** 3

    results = {}
    backends = [("numpy", _kernels_py)]
    if HAVE_EXT:
        backends.insert(0, ("cython", _kernels))
    for name, impl in backends:
        t_step, t_norm, nrm, out = bench(impl, pad, pad, args.steps,
                                         2.0 * dt, inv2d, grid.cell_volume)
        results[name] = (t_step, t_norm, nrm, out)
        print(f"{name:>7}: step {t_step * 1e3:8.2f} ms "
              f"({nodes / t_step / 1e6:8.1f} Mnode-updates/s)   "
              f"norm {t_norm * 1e3:7.2f} ms   |psi|^2 = {nrm:.12f}")

    if HAVE_EXT:
        speed = results["numpy"][0] / results["cython"][0]
        diff = float(np.abs(results["numpy"][3]
                            - results["cython"][3]).max())
        print(f"\nspeedup (step): {speed:.1f}x    "
              f"max field difference: {diff:.3e}")


if __name__ == "__main__":
    main()
