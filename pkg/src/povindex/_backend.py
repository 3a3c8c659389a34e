"""Kernel backend selection.

POVINDEX_BACKEND controls which implementation of the hot numeric kernels is
used:

* ``numba`` -- require the @njit-compiled kernels (error if numba is missing),
* ``numpy`` -- force the pure-numpy fallback,
* ``auto`` or unset -- numba when importable, numpy otherwise.
"""

from __future__ import annotations

import os


def _resolve() -> str:
    requested = os.environ.get("POVINDEX_BACKEND", "auto").strip().lower() or "auto"
    if requested not in ("auto", "numba", "numpy"):
        raise RuntimeError(
            f"POVINDEX_BACKEND must be 'numba', 'numpy' or 'auto', got {requested!r}"
        )
    if requested == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if requested == "numba":
            raise ImportError("POVINDEX_BACKEND=numba but numba is not installed") from None
        return "numpy"
    return "numba"


ACTIVE_BACKEND = _resolve()
USE_NUMBA = ACTIVE_BACKEND == "numba"
