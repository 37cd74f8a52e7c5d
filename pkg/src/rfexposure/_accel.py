"""Backend selection for the numeric kernels.

Set ``RFEXPOSURE_DISABLE_NUMBA=1`` to force the pure-numpy path.  When numba
is missing the numpy path is used automatically.
"""
import os
import warnings

_FALSY = {"", "0", "false", "no", "off"}


def _env_disabled():
    return os.environ.get("RFEXPOSURE_DISABLE_NUMBA", "").strip().lower() not in _FALSY


try:
    from numba import njit
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func
        return decorator

    warnings.warn("numba could not be imported; using the numpy kernels")

USE_NUMBA = NUMBA_AVAILABLE and not _env_disabled()

__all__ = ["njit", "NUMBA_AVAILABLE", "USE_NUMBA"]
