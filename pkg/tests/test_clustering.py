import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_array_equal
from scipy.spatial.distance import cdist
from sklearn.cluster import KMeans

from _oracles import brute_force_medoid_cost
from stepclust import _kernels_numba, _kernels_numpy
from stepclust.clustering import (
    cluster,
    gap_statistic,
    kmeans,
    medoid_cost,
    pam,
    within_dispersion,
)
from stepclust.errors import ContractError
from stepclust.evaluation import ccr


def blobs(rng, centers, n=30, sd=1.0):
    X = np.concatenate([rng.normal(c, sd, size=(n, len(c))) for c in centers])
    y = np.repeat(np.arange(len(centers)), n)
    return X, y


@pytest.mark.parametrize("method", ["kmeans", "pam"])
def test_separable_blobs(rng, method):
    X, y = blobs(rng, [(-10, 0), (10, 0)])
    res = cluster(X, 2, method, seed=1)
    assert ccr(y, res.labels) == 1.0
    if method == "pam":
        for m in res.centers:
            assert np.linalg.norm(X[m] - X[y == y[m]].mean(axis=0)) < 3


def test_k_equals_n_and_one(rng):
    X = rng.normal(size=(8, 3))
    assert kmeans(X, 8).inertia == pytest.approx(0, abs=1e-20)
    one = kmeans(X, 1)
    assert not one.labels.any()
    assert one.inertia == pytest.approx(((X - X.mean(axis=0)) ** 2).sum())
    assert pam(X, 8).inertia == 0


def test_contract_errors(rng):
    X = rng.normal(size=(5, 2))
    for method in ("kmeans", "pam"):
        with pytest.raises(ContractError):
            cluster(X, 6, method)
        with pytest.raises(ContractError):
            cluster(X, 0, method)
    with pytest.raises(ContractError):
        cluster(X, 2, "ward")


def test_kmeans_inertia_close_to_sklearn(rng):
    X, _ = blobs(rng, [(0, 0, 0), (4, 4, 0), (0, 5, 5), (6, 0, 6)], n=40, sd=1.5)
    ours = kmeans(X, 4, seed=3).inertia
    ref = KMeans(4, n_init=25, random_state=0).fit(X).inertia_
    assert ours <= ref * (1 + 1e-6)


def test_lloyd_history_non_increasing(rng):
    X, _ = blobs(rng, [(0, 0), (3, 3), (0, 4)], n=50, sd=1.5)
    res = kmeans(X, 3, seed=5, restarts=1)
    h = res.history
    assert h.size == res.n_iter + 1
    assert np.all(np.diff(h) <= 1e-9 * h[0])


def test_pam_history_non_increasing(rng):
    X = rng.normal(size=(60, 2))
    res = pam(X, 4)
    assert np.all(np.diff(res.history) <= 1e-12)
    assert res.inertia == pytest.approx(medoid_cost(cdist(X, X), res.centers))


def test_determinism(rng):
    X = rng.normal(size=(80, 3))
    for method in ("kmeans", "pam"):
        a, b = cluster(X, 4, method, seed=9), cluster(X, 4, method, seed=9)
        assert_array_equal(a.labels, b.labels)


def test_costs_invariant_to_relabeling(rng):
    X = rng.normal(size=(40, 2))
    res = kmeans(X, 3)
    perm = np.array([2, 0, 1])
    assert within_dispersion(X, perm[res.labels]) == pytest.approx(within_dispersion(X, res.labels))
    assert within_dispersion(X, res.labels) == pytest.approx(res.inertia)


def test_every_cluster_used(rng):
    X = np.concatenate([rng.normal(size=(30, 2)), [[50.0, 50.0]]])
    for method in ("kmeans", "pam"):
        res = cluster(X, 5, method)
        assert set(res.labels) == set(range(5))


def test_outlier_not_a_medoid():
    rng = np.random.default_rng(2)
    X = np.concatenate([rng.normal(0, 0.5, (5, 2)), rng.normal(6, 0.5, (5, 2)), [[7.0, 20.0]]])
    res = pam(X, 2)
    assert 10 not in res.centers
    D = cdist(X, X)
    assert res.inertia == pytest.approx(brute_force_medoid_cost(D, 2))
    km = kmeans(X, 2)
    km_cost = sum(np.linalg.norm(X[km.labels == c] - km.centers[c], axis=1).sum() for c in range(2))
    assert res.inertia <= km_cost + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 10), st.integers(1, 3), st.integers(0, 10**6))
def test_pam_matches_brute_force_small(n, k, seed):
    X = np.random.default_rng(seed).normal(size=(n, 2))
    D = cdist(X, X)
    opt = brute_force_medoid_cost(D, k)
    assert pam(X, k).inertia <= opt * 1.02 + 1e-12


def test_textbook_pam_can_stop_at_local_optimum():
    X = np.random.default_rng(0).normal(size=(6, 2))
    D = cdist(X, X)
    opt = brute_force_medoid_cost(D, 3)
    assert pam(X, 3, restarts=1).inertia > opt * 1.05
    assert pam(X, 3).inertia == pytest.approx(opt)


def test_backends_agree(rng):
    X, _ = blobs(rng, [(0, 0), (3, 3), (0, 4)], n=40, sd=1.2)
    C0 = X[[0, 45, 90]].copy()
    a = _kernels_numpy.lloyd(X, C0.copy(), 300, 1e-6)
    b = _kernels_numba.lloyd(X, C0.copy(), 300, 1e-6)
    assert_array_equal(a[0], b[0])
    np.testing.assert_allclose(a[1], b[1], rtol=1e-12)
    D = cdist(X, X)
    ma = _kernels_numpy.pam_build(D, 3)
    assert_array_equal(ma, _kernels_numba.pam_build(D, 3))
    sa, sb = _kernels_numpy.pam_swap(D, ma.copy(), 100), _kernels_numba.pam_swap(D, ma.copy(), 100)
    assert_array_equal(np.sort(sa[0]), np.sort(sb[0]))
    assert sa[1] == pytest.approx(sb[1])


def test_empty_cluster_reseeded():
    X = np.array([[0.0], [0.1], [0.2], [10.0]])
    centers = np.array([[0.1], [100.0]])  # second centre attracts nobody
    labels, C, inertia, *_ = _kernels_numpy.lloyd(X, centers, 50, 1e-9)
    assert set(labels) == {0, 1}
    labels_nb, *_ = _kernels_numba.lloyd(X, centers.copy(), 50, 1e-9)
    assert_array_equal(labels, labels_nb)


def test_assignment_ties_go_to_lowest_index():
    X = np.array([[0.0], [2.0], [1.0]])
    labels, *_ = _kernels_numpy.lloyd(X, np.array([[0.0], [2.0]]), 0, 1e-9)
    assert labels[2] == 0


def test_gap_three_blobs_and_null():
    rng = np.random.default_rng(0)
    X = np.concatenate([rng.normal((0, 0), 1, (25, 2)), rng.normal((0, 5), 1, (25, 2)),
                        rng.normal((5, -3), 1, (50, 2))])
    g = gap_statistic(X, k_max=6, b=10, seed=1)
    assert g.chosen_k == 3
    assert g.ks.tolist() == list(range(1, 7))
    assert np.all(g.sks > 0)
    null = gap_statistic(rng.normal(size=(90, 2)), k_max=5, b=10, seed=1)
    assert null.chosen_k == 1
    pg = gap_statistic(X, k_max=5, b=5, method="pam", seed=1)
    assert pg.chosen_k == 3


def test_gap_contract():
    with pytest.raises(ContractError):
        gap_statistic(np.zeros((5, 2)), k_max=1)
