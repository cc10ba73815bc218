"""Switch between numba-compiled kernels and the plain numpy path.

Set ``RANGESMF_DISABLE_NUMBA=1`` to run every kernel as ordinary Python/numpy.
"""
import os

_flag = os.environ.get("RANGESMF_DISABLE_NUMBA", "0").strip().lower()
DISABLE_NUMBA = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_ACTIVE = numba is not None and not DISABLE_NUMBA


def njit(fn):
    if not NUMBA_ACTIVE:
        return fn
    return numba.njit(cache=True)(fn)
