"""Backend switch for the compiled kernels.

Set ``STEPCLUST_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
"""

import os
import warnings

_FLAG = os.environ.get("STEPCLUST_DISABLE_NUMBA", "").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")

if not HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on"):  # pragma: no cover
    warnings.warn("numba not installed; falling back to numpy kernels", RuntimeWarning)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
