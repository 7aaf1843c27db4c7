"""Backend selection for the hot numeric kernels.

``SEMRD_BACKEND=numpy`` forces the vectorized pure-numpy fallback;
``SEMRD_BACKEND=numba`` requires numba and fails loudly if it is missing.
When unset, numba is used if importable. ``SEMRD_THREADS`` caps the number
of worker threads used for independent solver branches (default 1).
"""

import os

_FLAG = os.environ.get("SEMRD_BACKEND", "").strip().lower()
if _FLAG not in ("", "numba", "numpy"):
    raise RuntimeError(f"SEMRD_BACKEND must be 'numba' or 'numpy', got {_FLAG!r}")

if _FLAG == "numpy":
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        if _FLAG == "numba":
            raise
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"


def jit(func):
    """Compile ``func`` with numba when the numba backend is active."""
    if NUMBA_ENABLED:
        import numba

        return numba.njit(cache=True, nogil=True)(func)
    return func


def thread_count() -> int:
    """Worker-thread cap for independent solver branches."""
    raw = os.environ.get("SEMRD_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1
