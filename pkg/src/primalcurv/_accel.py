"""Numba availability and the backend switch.

Set ``PRIMALCURV_NO_NUMBA=1`` to force the pure-numpy kernels even when numba
is importable.
"""

import os


def _noop_jit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def _have_numba():
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


HAVE_NUMBA = _have_numba()
NUMBA_DISABLED = os.environ.get("PRIMALCURV_NO_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
}

if HAVE_NUMBA:
    from numba import njit
else:
    njit = _noop_jit


def default_backend():
    return "numba" if HAVE_NUMBA and not NUMBA_DISABLED else "numpy"
