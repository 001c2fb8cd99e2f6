"""K-means, PAM and gap-statistic model selection on score vectors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from . import kernels
from .errors import ContractError

KMEANS_RESTARTS = 25
KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6
PAM_MAX_ITER = 1000
PAM_RESTARTS = 10


@dataclass
class ClusterResult:
    k: int
    labels: np.ndarray
    centers: np.ndarray  # centroids (k, R) for K-means, medoid row indices for PAM
    inertia: float  # squared-distance sum (K-means) or distance sum to medoids (PAM)
    seed: int
    method: str = "kmeans"
    history: np.ndarray = field(default=None, repr=False)
    n_iter: int = 0

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


@dataclass
class GapCurve:
    ks: np.ndarray
    gaps: np.ndarray
    sks: np.ndarray
    chosen_k: int
    log_w: np.ndarray = field(default=None, repr=False)
    log_w_ref: np.ndarray = field(default=None, repr=False)


def _check(X, k):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1:
        raise ContractError("scores must be an (N, R) matrix with N >= 1")
    if not 1 <= int(k) <= X.shape[0]:
        raise ContractError(f"k={k} must lie in [1, N={X.shape[0]}]")
    return X, int(k)


def kmeans_plusplus(X, k, rng):
    n = X.shape[0]
    idx = [int(rng.integers(n))]
    d2 = ((X - X[idx[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            j = int(rng.choice(n, p=d2 / total))
        else:
            j = int(rng.integers(n))
        idx.append(j)
        d2 = np.minimum(d2, ((X - X[j]) ** 2).sum(axis=1))
    return X[idx].copy()


def kmeans(
    scores,
    k: int,
    seed: int = 0,
    restarts: int = KMEANS_RESTARTS,
    max_iter: int = KMEANS_MAX_ITER,
    tol: float = KMEANS_TOL,
) -> ClusterResult:
    """Lloyd's algorithm from k-means++ starts; the lowest-inertia restart wins."""
    X, k = _check(scores, k)
    best = None
    for child in np.random.SeedSequence(seed).spawn(max(int(restarts), 1)):
        rng = np.random.default_rng(child)
        labels, centers, inertia, n_iter, hist = kernels.lloyd(X, kmeans_plusplus(X, k, rng), max_iter, tol)
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia, n_iter, hist)
    labels, centers, inertia, n_iter, hist = best
    return ClusterResult(
        k, np.asarray(labels, dtype=np.int64), centers, float(inertia), seed, "kmeans",
        hist[: n_iter + 1], int(n_iter),
    )


def medoid_cost(D, medoids) -> float:
    return float(D[:, list(medoids)].min(axis=1).sum())


def pam(
    scores,
    k: int,
    seed: int = 0,
    max_iter: int = PAM_MAX_ITER,
    restarts: int = PAM_RESTARTS,
) -> ClusterResult:
    """Partitioning around medoids (BUILD then SWAP) under Euclidean distance.

    SWAP is run from the BUILD medoids and, when ``restarts > 1``, also from
    ``restarts - 1`` seeded random medoid sets; the cheapest local optimum
    wins, with ties going to the BUILD start. ``restarts=1`` is textbook PAM.
    """
    X, k = _check(scores, k)
    D = cdist(X, X)
    starts = [kernels.pam_build(D, k)]
    for child in np.random.SeedSequence(seed).spawn(max(int(restarts), 1) - 1):
        starts.append(np.sort(np.random.default_rng(child).choice(X.shape[0], k, replace=False)))
    best = None
    for start in starts:
        medoids, cost, hist = kernels.pam_swap(D, start, max_iter)
        if best is None or cost < best[1] - 1e-12 * max(best[1], 1.0):
            best = (medoids, cost, hist)
    medoids, cost, hist = best
    medoids = np.sort(np.asarray(medoids, dtype=np.int64))
    labels = np.argmin(D[:, medoids], axis=1)
    return ClusterResult(k, labels, medoids, float(cost), seed, "pam", np.asarray(hist), len(hist) - 1)


def cluster(scores, k: int, method: str = "kmeans", seed: int = 0, **kw) -> ClusterResult:
    if method == "kmeans":
        return kmeans(scores, k, seed=seed, **kw)
    if method == "pam":
        return pam(scores, k, seed=seed, **kw)
    raise ContractError(f"unknown clustering method {method!r}")


def within_dispersion(X, labels) -> float:
    """Pooled within-cluster sum of squares about cluster means (W_k)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    w = 0.0
    for c in np.unique(labels):
        pts = X[labels == c]
        w += float(((pts - pts.mean(axis=0)) ** 2).sum())
    return w


def _log_w(X, k, method, seed, restarts):
    kw = {"restarts": restarts} if method == "kmeans" else {}
    res = cluster(X, k, method=method, seed=seed, **kw)
    return np.log(max(within_dispersion(X, res.labels), 1e-300))


def gap_statistic(
    scores,
    k_max: int = 10,
    b: int = 20,
    method: str = "kmeans",
    seed: int = 0,
    restarts: int = KMEANS_RESTARTS,
) -> GapCurve:
    """Gap statistic with a uniform bounding-box reference distribution.

    Chooses the smallest k with Gap(k) >= Gap(k+1) - s_{k+1}.
    """
    X = np.asarray(scores, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if k_max < 2 or b < 1:
        raise ContractError("gap statistic needs k_max >= 2 and b >= 1")
    n = X.shape[0]
    ks = np.arange(1, min(int(k_max), n) + 1)
    lo, hi = X.min(axis=0), X.max(axis=0)
    log_w = np.array([_log_w(X, k, method, seed, restarts) for k in ks])
    ref = np.empty((b, ks.size))
    for j, child in enumerate(np.random.SeedSequence([seed, 1]).spawn(b)):
        rng = np.random.default_rng(child)
        Xb = lo + rng.random(X.shape) * (hi - lo)
        ref[j] = [_log_w(Xb, k, method, seed, restarts) for k in ks]
    gaps = ref.mean(axis=0) - log_w
    sks = ref.std(axis=0) * np.sqrt(1.0 + 1.0 / b)
    chosen = int(ks[-1])
    for i in range(ks.size - 1):
        if gaps[i] >= gaps[i + 1] - sks[i + 1]:
            chosen = int(ks[i])
            break
    return GapCurve(ks, gaps, sks, chosen, log_w, ref)
