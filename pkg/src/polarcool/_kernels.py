"""Hot-loop kernels: fixed-step RK4 propagation of the covariance ODE.

The jitted path and the plain-numpy path run the same function body; set
POLARCOOL_DISABLE_NUMBA=1 (or uninstall numba) to force the fallback.
``rk4_covariance(..., force_python=True)`` selects the fallback per call,
which is what the benchmark uses to compare the two.
"""
from __future__ import annotations

import os

import numpy as np


def _identity_decorator(*args, **kwargs):
    def wrap(fn):
        return fn
    return wrap


_DISABLED = os.environ.get("POLARCOOL_DISABLE_NUMBA", "").strip() not in ("", "0")
try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAS_NUMBA = True
except ImportError:
    njit = _identity_decorator
    HAS_NUMBA = False


@njit(cache=True)
def _rk4_loop(R, D, V, steps, h):
    Rt = R.T.copy()
    for _ in range(steps):
        k1 = R @ V + V @ Rt + D
        V2 = V + (0.5 * h) * k1
        k2 = R @ V2 + V2 @ Rt + D
        V3 = V + (0.5 * h) * k2
        k3 = R @ V3 + V3 @ Rt + D
        V4 = V + h * k3
        k4 = R @ V4 + V4 @ Rt + D
        V = V + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return V


# undecorated twin of the jitted loop, for the fallback path and benchmarks
_rk4_python = _rk4_loop.py_func if HAS_NUMBA else _rk4_loop


def rk4_covariance(R, D, V0, steps: int, h: float, force_python: bool = False):
    """Propagate dV/dt = R V + V R^T + D over ``steps`` fixed RK4 steps of size ``h``."""
    R = np.ascontiguousarray(R, dtype=np.float64)
    D = np.ascontiguousarray(D, dtype=np.float64)
    V = np.ascontiguousarray(V0, dtype=np.float64).copy()
    fn = _rk4_python if (force_python or not HAS_NUMBA) else _rk4_loop
    return fn(R, D, V, steps, h)
