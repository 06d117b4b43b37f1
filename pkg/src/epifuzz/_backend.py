"""Kernel backend selection.

Hot loops are compiled with numba when it is importable. Setting
``EPIFUZZ_DISABLE_NUMBA=1`` forces the vectorised numpy path, which gives the
same results (up to libm rounding in the movement trigonometry) and is used by
the benchmark for comparison.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None
NUMBA_DISABLED = os.environ.get("EPIFUZZ_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

BACKENDS = ("numba", "numpy")
DEFAULT_BACKEND = "numba" if HAS_NUMBA and not NUMBA_DISABLED else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if HAS_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda fn: fn


def resolve_backend(backend=None):
    if backend is None:
        return DEFAULT_BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
