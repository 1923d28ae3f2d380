"""Optional numba acceleration for the hot numeric kernels.

Every jitted kernel in this package is written in plain numpy-compatible
Python and passed through :func:`maybe_jit`.  When numba is installed and
``WANGDYN_DISABLE_NUMBA`` is unset, kernels run under ``@njit``; otherwise
the identical Python source runs as-is (slower, same results).  This keeps
a single implementation for both paths.
"""

from __future__ import annotations

import os

DISABLE_ENV = "WANGDYN_DISABLE_NUMBA"


def _numba_wanted() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip() not in ("1", "true", "yes", "on")


USING_NUMBA = False
if _numba_wanted():
    try:
        from numba import njit as _njit

        USING_NUMBA = True
    except ImportError:
        USING_NUMBA = False


def maybe_jit(func=None, **kwargs):
    """``numba.njit`` when acceleration is on, identity otherwise.

    Usable bare (``@maybe_jit``) or with njit options
    (``@maybe_jit(cache=True)``).
    """
    if func is not None:
        return _njit(cache=True)(func) if USING_NUMBA else func

    def wrap(f):
        if USING_NUMBA:
            return _njit(**{"cache": True, **kwargs})(f)
        return f

    return wrap
