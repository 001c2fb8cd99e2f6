"""Hot loops, dispatched to numba or numpy according to ``_accel.USE_NUMBA``.

Both backends are importable directly (``numpy_backend`` / ``numba_backend``)
so tests and the benchmark script can compare them side by side.
"""

import numpy as np

from . import _kernels_numpy as numpy_backend
from ._accel import HAVE_NUMBA, USE_NUMBA

if HAVE_NUMBA:
    from . import _kernels_numba as numba_backend
else:  # pragma: no cover
    numba_backend = None

_impl = numba_backend if USE_NUMBA else numpy_backend


def features_batch(X, q1, q2):
    """Cumulative sum, ordered quantile slope and mean score for every row."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    return _impl.features_batch(X, int(q1), int(q2))


def lloyd(X, centers, max_iter, tol):
    return _impl.lloyd(
        np.ascontiguousarray(X, dtype=np.float64),
        np.ascontiguousarray(centers, dtype=np.float64),
        int(max_iter),
        float(tol),
    )


def pam_build(D, k):
    return _impl.pam_build(np.ascontiguousarray(D, dtype=np.float64), int(k))


def pam_swap(D, medoids, max_iter):
    return _impl.pam_swap(
        np.ascontiguousarray(D, dtype=np.float64),
        np.asarray(medoids, dtype=np.int64),
        int(max_iter),
    )
