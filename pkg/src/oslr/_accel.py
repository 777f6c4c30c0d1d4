"""Numba toggle for the numeric kernels.

Kernels in :mod:`oslr._kernels` are written as plain vectorized numpy and are
JIT-compiled when numba is importable. Set ``OSLR_DISABLE_NUMBA=1`` (or
``true``/``yes``/``on``) to skip compilation and run the identical numpy code
paths; this is also the automatic fallback when numba is not installed.
"""

import os


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


NUMBA_REQUESTED = not _env_flag("OSLR_DISABLE_NUMBA")

if NUMBA_REQUESTED:
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - exercised via the env flag instead
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def jit_kernel(func):
        return _njit(cache=True)(func)

else:

    def jit_kernel(func):
        return func
