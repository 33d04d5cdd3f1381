"""Optional numba acceleration.

Set ``GNX_NUMBA=0`` in the environment to force the pure-numpy paths. The
flag is read once at import time; :func:`use_numba` reports the active mode.
"""
import os

_flag = os.environ.get("GNX_NUMBA", "1").strip().lower()
_WANT_NUMBA = _flag not in ("0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
    # skip the TBB probe, which warns on older system TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _WANT_NUMBA


def use_numba():
    return USE_NUMBA


def njit(func=None, parallel=False):
    """Compile ``func`` with numba when available, else return it as is."""
    def wrap(fn):
        if HAVE_NUMBA:
            return numba.njit(cache=True, nogil=True, parallel=parallel)(fn)
        return fn
    return wrap if func is None else wrap(func)


prange = numba.prange if HAVE_NUMBA else range


def thread_count():
    """Worker count from ``GNX_THREADS``, defaulting to the CPU count."""
    raw = os.environ.get("GNX_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1
