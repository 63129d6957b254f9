"""Backend selection for the MD hot loops.

The numba kernels are the default; set THERMOBOUND_NUMBA=0 (or unset numba)
to run the pure-numpy twins.  NUMBA_DISABLE_JIT=1 is honored too.
benchmarks/bench_md.py compares the two.
"""

import os

_flag = os.environ.get("THERMOBOUND_NUMBA", "1").strip().lower()
_disabled = _flag in ("0", "false", "no") or \
    os.environ.get("NUMBA_DISABLE_JIT", "0").strip() == "1"

if not _disabled:
    try:
        from . import _numba_kernels as _impl
        BACKEND = "numba"
    except ImportError:
        from . import _numpy_kernels as _impl
        BACKEND = "numpy"
else:
    from . import _numpy_kernels as _impl
    BACKEND = "numpy"

POT_LJ = _impl.POT_LJ
POT_HARMONIC = _impl.POT_HARMONIC
compute_forces = _impl.compute_forces
integrate_chunk = _impl.integrate_chunk


def backend():
    return BACKEND
