"""Backend selection for the hot kernels.

Set ``TAILSORT_BACKEND=numpy`` (or ``TAILSORT_DISABLE_NUMBA=1``) before import
to run the pure-numpy / pure-python fallback instead of the numba kernels.
"""

import os

_flag = os.environ.get("TAILSORT_BACKEND", "").strip().lower()
_disabled = os.environ.get("TAILSORT_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled and _flag != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"
