"""Loop kernels compiled with numba; semantics mirror ``_kernels_numpy``."""

import numpy as np
from numba import njit


@njit(cache=True)
def _quantile_times_into(s, q, times):
    # returns False for a non-positive total
    T = s.shape[0]
    total = s[T - 1]
    if not total > 0.0:
        return False
    times[0] = 0
    for k in range(1, q + 1):
        thr = k * total
        t = 0
        while t < T and s[t] * q < thr:
            t += 1
        times[k] = t + 1
    return True


@njit(cache=True)
def quantile_times(s, q):
    times = np.empty(q + 1, dtype=np.int64)
    if not _quantile_times_into(s, q, times):
        return times[:0]
    return times


@njit(cache=True)
def quantile_slope(times, total, q, T):
    out = np.zeros(T, dtype=np.float64)
    per = total / q
    last = 0.0
    for k in range(q):
        a = times[k]
        b = times[k + 1]
        if b > a:
            last = per / (b - a)
            for t in range(a, b):
                out[t] = last
        else:
            last = per
            out[b - 1] = last
    for t in range(times[q], T):
        out[t] = last
    return out


@njit(cache=True)
def mean_score(x, q2):
    T = x.shape[0]
    out = np.zeros(T, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    cs = np.empty(T, dtype=np.float64)
    acc = 0.0
    for r in range(T):
        acc += x[order[r]]
        cs[r] = acc
    tq = np.empty(q2 + 1, dtype=np.int64)
    if not _quantile_times_into(cs, q2, tq):
        return out
    width = T // q2
    u = np.zeros(T, dtype=np.float64)
    band = 0
    for r in range(T):
        rank = r + 1
        while band < q2 - 1 and rank > tq[band + 1]:
            band += 1
        u[order[r]] = band
    for b in range(q2):
        acc = 0.0
        for t in range(b * width, (b + 1) * width):
            acc += u[t]
        m = acc / width
        for t in range(b * width, (b + 1) * width):
            out[t] = m
    return out


@njit(cache=True)
def features_batch(X, q1, q2):
    n, T = X.shape
    S = np.zeros((n, T))
    I = np.zeros((n, T))
    P = np.zeros((n, T))
    times = np.empty(q1 + 1, dtype=np.int64)
    for i in range(n):
        acc = 0.0
        for t in range(T):
            acc += X[i, t]
            S[i, t] = acc
        if not _quantile_times_into(S[i], q1, times):
            continue
        I[i] = np.sort(quantile_slope(times, S[i, T - 1], q1, T))
        P[i] = mean_score(X[i], q2)
    return S, I, P


@njit(cache=True)
def assign(X, centers):
    n, d = X.shape
    k = centers.shape[0]
    labels = np.empty(n, dtype=np.int64)
    best = np.empty(n, dtype=np.float64)
    for i in range(n):
        bl = 0
        bd = np.inf
        for c in range(k):
            acc = 0.0
            for j in range(d):
                diff = X[i, j] - centers[c, j]
                acc += diff * diff
            if acc < bd:
                bd = acc
                bl = c
        labels[i] = bl
        best[i] = bd
    return labels, best


@njit(cache=True)
def lloyd(X, centers, max_iter, tol):
    n, d = X.shape
    k = centers.shape[0]
    centers = centers.copy()
    history = np.full(max_iter + 1, np.nan)
    n_iter = 0
    for it in range(max_iter):
        labels, best = assign(X, centers)
        history[it] = best.sum()
        new = np.zeros((k, d))
        counts = np.zeros(k, dtype=np.int64)
        for i in range(n):
            c = labels[i]
            counts[c] += 1
            for j in range(d):
                new[c, j] += X[i, j]
        far = best.copy()
        for c in range(k):
            if counts[c] > 0:
                for j in range(d):
                    new[c, j] /= counts[c]
            else:
                p = np.argmax(far)
                for j in range(d):
                    new[c, j] = X[p, j]
                far[p] = -1.0
        shift = 0.0
        for c in range(k):
            acc = 0.0
            for j in range(d):
                diff = new[c, j] - centers[c, j]
                acc += diff * diff
            if acc > shift:
                shift = acc
        centers = new
        n_iter = it + 1
        if np.sqrt(shift) < tol:
            break
    labels, best = assign(X, centers)
    inertia = best.sum()
    history[n_iter] = inertia
    return labels, centers, inertia, n_iter, history


@njit(cache=True)
def pam_build(D, k):
    n = D.shape[0]
    medoids = np.empty(k, dtype=np.int64)
    first = 0
    first_sum = np.inf
    for h in range(n):
        acc = 0.0
        for j in range(n):
            acc += D[h, j]
        if acc < first_sum:
            first_sum = acc
            first = h
    medoids[0] = first
    chosen = np.zeros(n, dtype=np.bool_)
    chosen[first] = True
    near = D[first].copy()
    for m in range(1, k):
        bh = -1
        bg = -1.0
        for h in range(n):
            if chosen[h]:
                continue
            g = 0.0
            for j in range(n):
                diff = near[j] - D[h, j]
                if diff > 0.0:
                    g += diff
            if g > bg:
                bg = g
                bh = h
        medoids[m] = bh
        chosen[bh] = True
        for j in range(n):
            if D[bh, j] < near[j]:
                near[j] = D[bh, j]
    return medoids


@njit(cache=True)
def _nearest_two(D, medoids, nidx, dn, ds):
    n = D.shape[0]
    k = medoids.shape[0]
    for j in range(n):
        b1 = np.inf
        b2 = np.inf
        i1 = 0
        for i in range(k):
            v = D[j, medoids[i]]
            if v < b1:
                b2 = b1
                b1 = v
                i1 = i
            elif v < b2:
                b2 = v
        nidx[j] = i1
        dn[j] = b1
        ds[j] = b2


@njit(cache=True)
def pam_swap(D, medoids, max_iter):
    medoids = medoids.copy()
    n = D.shape[0]
    k = medoids.shape[0]
    nidx = np.empty(n, dtype=np.int64)
    dn = np.empty(n)
    ds = np.empty(n)
    history = np.full(max_iter + 1, np.nan)
    _nearest_two(D, medoids, nidx, dn, ds)
    history[0] = dn.sum()
    scale = max(dn.sum(), 1.0)
    is_med = np.zeros(n, dtype=np.bool_)
    steps = 0
    for it in range(max_iter):
        is_med[:] = False
        for i in range(k):
            is_med[medoids[i]] = True
        best_delta = 0.0
        best_i = -1
        best_h = -1
        for i in range(k):
            for h in range(n):
                if is_med[h]:
                    continue
                delta = 0.0
                for j in range(n):
                    dhj = D[h, j]
                    if nidx[j] == i:
                        delta += min(dhj, ds[j]) - dn[j]
                    elif dhj < dn[j]:
                        delta += dhj - dn[j]
                if delta < best_delta:
                    best_delta = delta
                    best_i = i
                    best_h = h
        if best_i < 0 or best_delta > -1e-12 * scale:
            break
        medoids[best_i] = best_h
        _nearest_two(D, medoids, nidx, dn, ds)
        steps = it + 1
        history[steps] = dn.sum()
    return medoids, dn.sum(), history[: steps + 1]
