"""Numerical backend selection.

The hot kernels (grid reachability expansion, fixed-step RK4) come in two
flavors: numba-jitted loops and pure-numpy implementations.  The env var
``SE2CONTROL_BACKEND=numpy`` forces the fallback; anything else uses numba
when it is importable.  Both paths execute the same floating-point operations
in the same order, so results are identical bit for bit.
"""

from __future__ import annotations

import os

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

_REQUESTED = os.environ.get("SE2CONTROL_BACKEND", "numba").strip().lower()

USE_NUMBA = HAS_NUMBA and _REQUESTED != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit_or_python(func):
    """Jit `func` with numba on the numba backend, else return it unchanged.

    Used for scalar kernels whose pure-Python execution is an acceptable
    fallback (identical source, identical arithmetic).
    """
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def njit_if_available(func):
    """Always jit when numba is importable, regardless of the env flag.

    Used to expose the jitted variant to benchmarks even when the active
    backend is numpy.
    """
    if HAS_NUMBA:
        return numba.njit(cache=True)(func)
    return func
