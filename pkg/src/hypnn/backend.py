"""Kernel backend selection.

Hot numeric kernels (radius inversion, polar cone tree construction and
queries, neighbour counting) exist twice: a numba @njit implementation and
a pure numpy fallback. The environment variable HYPNN_BACKEND picks one:

    HYPNN_BACKEND=numba   force the jitted kernels (error if numba missing)
    HYPNN_BACKEND=numpy   force the pure-numpy fallback
    unset / auto          numba if importable, else numpy

The two backends implement identical algorithms; the fallback exists for
environments without numba and as a reference for the benchmark script.
"""

import os

_BACKEND = None


def _resolve():
    choice = os.environ.get("HYPNN_BACKEND", "auto").lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"HYPNN_BACKEND must be auto|numba|numpy, got {choice!r}")
    if choice in ("auto", "numba"):
        try:
            from . import _kernels_numba as mod
            return "numba", mod
        except ImportError:
            if choice == "numba":
                raise
    from . import _kernels_numpy as mod
    return "numpy", mod


def active_backend():
    """Return (name, kernel module) for the selected backend, cached."""
    global _BACKEND
    if _BACKEND is None:
        _BACKEND = _resolve()
    return _BACKEND


def kernels():
    return active_backend()[1]


def backend_name():
    return active_backend()[0]
