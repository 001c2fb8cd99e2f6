"""Pure-numpy reference kernels.

Each function here has a compiled twin in ``_kernels_numba`` with the same
signature and semantics; ``kernels`` picks one at import time.
"""

import numpy as np


def quantile_times(s, q):
    """First 1-based epochs at which ``s`` reaches k/q of its final value.

    Returns ``None`` when the final value is not positive.
    """
    s = np.asarray(s, dtype=np.float64)
    total = s[-1]
    if not total > 0.0:
        return None
    k = np.arange(1, q + 1, dtype=np.float64)
    # s * q >= k * total keeps integer data in exact arithmetic
    hit = (s[None, :] * q) >= (k[:, None] * total)
    times = np.empty(q + 1, dtype=np.int64)
    times[0] = 0
    times[1:] = np.argmax(hit, axis=1) + 1
    return times


def quantile_slope(times, total, q, T):
    out = np.zeros(T, dtype=np.float64)
    per = total / q
    last = 0.0
    for k in range(q):
        a, b = int(times[k]), int(times[k + 1])
        if b > a:
            last = per / (b - a)
            out[a:b] = last
        else:
            last = per
            out[b - 1] = last
    out[int(times[q]):] = last
    return out


def mean_score(x, q2):
    x = np.asarray(x, dtype=np.float64)
    T = x.shape[0]
    order = np.argsort(x, kind="stable")
    tq = quantile_times(np.cumsum(x[order]), q2)
    if tq is None:
        return np.zeros(T)
    rank = np.empty(T, dtype=np.int64)
    rank[order] = np.arange(1, T + 1)
    u = np.searchsorted(tq[1:q2], rank, side="left").astype(np.float64)
    blocks = u.reshape(q2, T // q2).mean(axis=1)
    return np.repeat(blocks, T // q2)


def features_batch(X, q1, q2):
    X = np.asarray(X, dtype=np.float64)
    n, T = X.shape
    S = np.cumsum(X, axis=1)
    I = np.zeros((n, T))
    P = np.zeros((n, T))
    for i in range(n):
        times = quantile_times(S[i], q1)
        if times is None:
            continue
        I[i] = np.sort(quantile_slope(times, S[i, -1], q1, T))
        P[i] = mean_score(X[i], q2)
    return S, I, P


def assign(X, centers):
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    best = d2[np.arange(X.shape[0]), labels]
    return labels, best


def lloyd(X, centers, max_iter, tol):
    """Lloyd iterations from ``centers``.

    Returns labels, centers, inertia, iteration count and the inertia after
    every assignment step (NaN-padded to ``max_iter + 1``).
    """
    X = np.asarray(X, dtype=np.float64)
    centers = np.array(centers, dtype=np.float64)
    k = centers.shape[0]
    history = np.full(max_iter + 1, np.nan)
    n_iter = 0
    for it in range(max_iter):
        labels, best = assign(X, centers)
        history[it] = best.sum()
        counts = np.bincount(labels, minlength=k)
        new = np.zeros_like(centers)
        np.add.at(new, labels, X)
        filled = counts > 0
        new[filled] /= counts[filled, None]
        if not filled.all():
            far = best.copy()
            for c in np.flatnonzero(~filled):
                j = int(np.argmax(far))
                new[c] = X[j]
                far[j] = -1.0
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        n_iter = it + 1
        if shift < tol:
            break
    labels, best = assign(X, centers)
    history[n_iter] = best.sum()
    return labels, centers, best.sum(), n_iter, history


def pam_build(D, k):
    n = D.shape[0]
    medoids = np.empty(k, dtype=np.int64)
    medoids[0] = int(np.argmin(D.sum(axis=1)))
    near = D[medoids[0]].copy()
    chosen = np.zeros(n, dtype=bool)
    chosen[medoids[0]] = True
    for m in range(1, k):
        gain = np.maximum(near[None, :] - D, 0.0).sum(axis=1)
        gain[chosen] = -1.0
        h = int(np.argmax(gain))
        medoids[m] = h
        chosen[h] = True
        near = np.minimum(near, D[h])
    return medoids


def _nearest_two(D, medoids):
    dm = D[:, medoids]
    if medoids.shape[0] == 1:
        return np.zeros(D.shape[0], dtype=np.int64), dm[:, 0], np.full(D.shape[0], np.inf)
    part = np.argsort(dm, axis=1, kind="stable")
    rows = np.arange(D.shape[0])
    return part[:, 0], dm[rows, part[:, 0]], dm[rows, part[:, 1]]


def pam_swap(D, medoids, max_iter):
    """Greedy best-improvement SWAP; returns medoids, cost and cost history."""
    medoids = np.array(medoids, dtype=np.int64)
    n = D.shape[0]
    k = medoids.shape[0]
    history = np.full(max_iter + 1, np.nan)
    nidx, dn, ds = _nearest_two(D, medoids)
    history[0] = dn.sum()
    scale = max(float(dn.sum()), 1.0)
    steps = 0
    for it in range(max_iter):
        is_med = np.zeros(n, dtype=bool)
        is_med[medoids] = True
        best_delta = 0.0
        best_i = -1
        best_h = -1
        lost = np.minimum(D, ds[None, :]) - dn[None, :]
        other = np.minimum(D - dn[None, :], 0.0)
        for i in range(k):
            own = nidx == i
            delta = np.where(own[None, :], lost, other).sum(axis=1)
            delta[is_med] = np.inf
            h = int(np.argmin(delta))
            if delta[h] < best_delta:
                best_delta = delta[h]
                best_i = i
                best_h = h
        if best_i < 0 or best_delta > -1e-12 * scale:
            break
        medoids[best_i] = best_h
        nidx, dn, ds = _nearest_two(D, medoids)
        steps = it + 1
        history[steps] = dn.sum()
    return medoids, dn.sum(), history[: steps + 1]
