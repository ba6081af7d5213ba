"""Numba switch.

Set ``OPSCHUR_DISABLE_JIT=1`` in the environment before import to run every
kernel through its pure-numpy implementation instead of the compiled one.
"""
import os

try:
    import numba
    HAS_NUMBA = True
    # TBB on this class of hosts is often too old; workqueue is always present.
    numba.config.THREADING_LAYER = os.environ.get("NUMBA_THREADING_LAYER", "workqueue")
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

ENABLE_JIT = HAS_NUMBA and os.environ.get("OPSCHUR_DISABLE_JIT", "0") not in ("1", "true", "yes")


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or a no-op decorator when numba is absent."""
    kwargs.setdefault("cache", True)
    if not HAS_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def set_threads(n):
    if HAS_NUMBA and n:
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))
