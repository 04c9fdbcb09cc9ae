"""Numba switch.

Hot kernels are written twice: a loop version compiled with ``numba.njit``
and a vectorised numpy version. ``SIMORDER_DISABLE_NUMBA=1`` (read once at
import) forces the numpy path everywhere, as does a missing numba install.
"""
import os

_flag = os.environ.get("SIMORDER_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled


def njit(*args, **kwargs):
    """``numba.njit(cache=True, nogil=True)`` or a no-op when numba is off."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    return numba.njit(*args, **kwargs)


def pick(numba_impl, numpy_impl):
    """Return the implementation selected for this process."""
    return numba_impl if USE_NUMBA else numpy_impl
