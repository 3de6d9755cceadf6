"""Optional numba acceleration with a pure NumPy fallback.

The numerical kernels are written once as plain nested-loop code.  When numba
is importable and not disabled they are compiled with ``@njit``; otherwise the
same source runs interpreted.  Set the environment variable
``NLEVEL_NO_NUMBA=1`` before import to force the fallback path.
"""

import os

DISABLE_ENV = "NLEVEL_NO_NUMBA"

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    njit = None
    _HAVE_NUMBA = False


def _disabled_by_env() -> bool:
    value = os.environ.get(DISABLE_ENV, "").strip().lower()
    return value not in ("", "0", "false", "no")


_ENABLED = _HAVE_NUMBA and not _disabled_by_env()


def numba_enabled() -> bool:
    """True when the compiled kernel path is active."""
    return _ENABLED


def maybe_jit(fn):
    """Compile ``fn`` when the numba path is active, else return it unchanged."""
    if _ENABLED:
        return njit(cache=True)(fn)
    return fn
