"""Optional numba acceleration.

Set ``ELITIST_CHAIN_DISABLE_NUMBA=1`` to force the pure-numpy code paths.
When numba is not importable the numpy paths are used as well.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

DISABLED = os.environ.get("ELITIST_CHAIN_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")
HAS_NUMBA = numba is not None
USE_NUMBA = HAS_NUMBA and not DISABLED


def njit(func):
    """``numba.njit(cache=True, nogil=True)`` or identity when numba is unavailable.

    The undecorated function is always reachable as ``func.py_func`` so the
    loop kernels can also run on object arrays (``Fraction`` entries).
    """
    if not HAS_NUMBA:
        func.py_func = func
        return func
    return numba.njit(cache=True, nogil=True)(func)


def resolve_backend(backend=None):
    """Return ``"numba"`` or ``"numpy"``; ``None`` picks the process default."""
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
