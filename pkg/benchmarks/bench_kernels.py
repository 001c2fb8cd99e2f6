"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py --repeats 5

Each kernel is run once untimed on both backends (JIT warm-up), then
``--repeats`` times; the best wall time is reported along with a check that
both backends return the same answer.
"""

import argparse
import time

import numpy as np
from scipy.spatial.distance import cdist

from stepclust.kernels import numba_backend, numpy_backend
from stepclust.simulation import SimSpec, generate


def best_of(fn, repeats):
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n_days, n_points, seed):
    X = generate(SimSpec("step-pattern", (n_days // 3,) * 3, seed=seed)).matrix.counts.astype(np.float64)
    rng = np.random.default_rng(seed)
    P = np.concatenate([rng.normal(c, 1.0, size=(n_points // 3, 4)) for c in (0.0, 4.0, 8.0)])
    centers = P[rng.choice(P.shape[0], 3, replace=False)].copy()
    D = cdist(P, P)
    medoids = numpy_backend.pam_build(D, 3)
    return {
        "features_batch": lambda b: b.features_batch(X, 8, 4),
        "lloyd": lambda b: b.lloyd(P, centers.copy(), 300, 1e-6),
        "pam_build": lambda b: b.pam_build(D, 3),
        "pam_swap": lambda b: b.pam_swap(D, medoids.copy(), 1000),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and np.allclose(a, b, equal_nan=True)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--days", type=int, default=300)
    ap.add_argument("--points", type=int, default=600)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print(f"{'kernel':<16}{'numpy (s)':>12}{'numba (s)':>12}{'speed-up':>10}  agree")
    for name, run in cases(args.days, args.points, args.seed).items():
        t_np = best_of(lambda: run(numpy_backend), args.repeats)
        t_nb = best_of(lambda: run(numba_backend), args.repeats)
        ok = same(run(numpy_backend), run(numba_backend))
        print(f"{name:<16}{t_np:>12.5f}{t_nb:>12.5f}{t_np / t_nb:>9.1f}x  {'yes' if ok else 'NO'}")


if __name__ == "__main__":
    main()
