"""Optional numba acceleration.

Set ``NAPHASE_DISABLE_NUMBA=1`` to force the pure-numpy code paths (also
used automatically when numba is not installed).
"""
from __future__ import annotations

import os

DISABLED = os.environ.get("NAPHASE_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - depends on the environment
    numba = None

USE_NUMBA = numba is not None and not DISABLED


def njit(fn):
    """``numba.njit(cache=True)`` when enabled, otherwise ``None``.

    Callers keep the numpy implementation as the fallback and dispatch on
    the returned value, so the Python-level kernel body is never run
    element by element.
    """
    if not USE_NUMBA:
        return None
    return numba.njit(cache=True)(fn)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
