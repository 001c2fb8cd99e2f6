"""Independent reference implementations used by several test modules."""

from itertools import combinations

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import BSpline


def simpson_weights(x):
    """Weights w with sum(w * f(x)) == simpson(f, x) for any f."""
    w = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = 1.0
        w[i] = simpson(e, x=x)
    return w


def dense_mfpca(smoothed, m=4001):
    """Eigen-decompose the discretized stacked covariance on a dense grid.

    Curves are evaluated with scipy's BSpline (not a design matrix), the
    inner product uses composite Simpson weights, and the spectrum comes
    from an SVD of the weighted, centered data matrix.
    Returns (eigenvalues, eigenfunctions (n, 3*m), grid, weights).
    """
    cols, ws, grids = [], [], []
    for c, b in zip(smoothed.coefficients, smoothed.bases):
        x = np.linspace(0.0, b.T, m)
        cols.append(BSpline(b.knot_vector, c.T, b.degree)(x).T)
        ws.append(simpson_weights(x))
        grids.append(x)
    Z = np.hstack(cols)
    w = np.concatenate(ws)
    Zc = Z - Z.mean(axis=0)
    A = Zc * np.sqrt(w)
    _, s, Vt = np.linalg.svd(A, full_matrices=False)
    lam = s**2 / (Z.shape[0] - 1)
    psi = Vt / np.sqrt(w)
    return lam, psi, grids, w


def brute_force_medoid_cost(D, k):
    return min(D[:, list(m)].min(axis=1).sum() for m in combinations(range(D.shape[0]), k))


def random_feature_data(n, T, seed):
    """Step-like counts whose features carry a few smooth modes of variation."""
    rng = np.random.default_rng(seed)
    t = np.arange(T) / T
    rows = []
    for _ in range(n):
        centre = rng.uniform(0.2, 0.8)
        width = rng.uniform(0.05, 0.25)
        level = rng.uniform(2, 12)
        rate = level * np.exp(-0.5 * ((t - centre) / width) ** 2) + 0.3
        rows.append(rng.poisson(rate))
    return np.array(rows, dtype=np.int64)
