"""Stencil kernel backend selection.

The compiled extension (diracpack._kernels, Cython/OpenMP) is preferred;
the numpy fallback is used when the extension is unavailable or when
DIRACPACK_FORCE_FALLBACK is set in the environment.  Both expose the same
functions with identical semantics; see benchmarks/bench_kernels.py for a
speed comparison.
"""

import os

if os.environ.get("DIRACPACK_FORCE_FALLBACK"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl          # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.backend()
hamiltonian_apply = _impl.hamiltonian_apply
leapfrog_combine = _impl.leapfrog_combine
norm_interior = _impl.norm_interior
