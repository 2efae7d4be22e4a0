"""Kernel selection: the compiled extension when built, else pure Python.

Set ``CTCLAB_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("CTCLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def cesaro(M, v0, N, keep_orbit=False, impl=None):
    k = impl or _impl
    M = np.ascontiguousarray(M, dtype=np.complex128)
    v0 = np.ascontiguousarray(v0, dtype=np.complex128)
    return k.cesaro(M, v0, int(N), bool(keep_orbit))


def trace_batch(t, x, side, s, tau, L, t0, delta, impl=None):
    k = impl or _impl
    # the compiled kernel needs writable C-contiguous buffers
    t = np.require(t, np.float64, ("C", "W"))
    x = np.require(x, np.float64, ("C", "W"))
    side = np.require(side, np.intc, ("C", "W"))
    return k.trace_batch(t, x, side, int(s), float(tau), float(L), float(t0), float(delta))
