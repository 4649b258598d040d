"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of Python/numpy.  With
numba available they are compiled with ``@njit``; setting the environment
variable ``SLELAB_DISABLE_NUMBA=1`` (or running without numba installed)
executes the very same functions as plain Python over numpy arrays.
"""

import os
import warnings

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("SLELAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

USE_NUMBA = numba is not None and not _DISABLED


def _identity_decorator(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(func):
        return func

    return wrap


if USE_NUMBA:
    # an old system TBB only makes numba fall back to another threading layer
    warnings.filterwarnings("ignore", message="The TBB threading layer")


    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        if len(args) == 1 and callable(args[0]):
            return numba.njit(**kwargs)(args[0])
        return numba.njit(*args, **kwargs)

    prange = numba.prange
else:
    njit = _identity_decorator
    prange = range


def backend_name():
    return "numba" if USE_NUMBA else "python"
