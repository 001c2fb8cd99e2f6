import numpy as np
import pytest
from numpy.testing import assert_allclose

from _oracles import dense_mfpca, random_feature_data
from stepclust.errors import ContractError, DegenerateVarianceError, InsufficientDataError
from stepclust.features import compute_features
from stepclust.ingest import DayMatrix
from stepclust.mfpca import MfpcaModel, ScoreMatrix, fit_mfpca, project, reconstruct
from stepclust.smoothing import BasisSpec, SmoothedDataset, epoch_grid, smooth


def smoothed_from_counts(X, q1=8, q2=4, n_basis=20):
    dm = DayMatrix([f"d{i}" for i in range(len(X))], X)
    return smooth(compute_features(dm, q1, q2), n_basis)


@pytest.fixture(scope="module")
def data():
    return smoothed_from_counts(random_feature_data(60, 200, seed=7))


@pytest.fixture(scope="module")
def model(data):
    return fit_mfpca(data, 0.9)


def inner(model, a, b):
    return a @ model.weight @ b


def test_orthonormal_eigenfunctions(model):
    P = model.eigen_coeffs
    rank = int(np.sum(model.eigenvalues > 1e-10 * model.eigenvalues[0]))
    G = P[:rank] @ model.weight @ P[:rank].T
    assert_allclose(G, np.eye(rank), atol=1e-8)


def test_eigenvalue_and_explained_bookkeeping(model, data):
    lam = model.eigenvalues
    assert np.all(np.diff(lam) <= 1e-12 * lam[0]) and lam.min() >= -1e-10
    assert np.all(np.diff(model.explained) >= -1e-15) and model.explained[-1] <= 1 + 1e-10
    C = data.stacked() - data.stacked().mean(axis=0)
    total = np.einsum("ij,jk,ik->", C, model.weight, C) / (data.N - 1)
    assert lam.sum() == pytest.approx(total, rel=1e-6)
    R = model.n_components
    assert model.explained[R - 1] >= 0.9 and (R == 1 or model.explained[R - 2] < 0.9)


def test_sign_convention(model):
    assert np.all(model.eigen_coeffs.sum(axis=1) >= 0)


def test_scores_have_eigenvalue_covariance(model, data):
    xi = project(model, data).scores
    assert_allclose(xi.mean(axis=0), 0, atol=1e-8)
    cov = np.cov(xi, rowvar=False)
    assert_allclose(np.diag(cov), model.eigenvalues[: model.n_components], rtol=1e-6)
    off = cov - np.diag(np.diag(cov))
    assert np.abs(off).max() < 1e-8 * model.eigenvalues[0]


def test_mean_projects_to_zero(model, data):
    mean_only = SmoothedDataset(model.split(model.mean_coeffs[None, :]), data.bases, data.scale)
    assert_allclose(project(model, mean_only).scores, 0, atol=1e-8)


def test_reconstruction_error_monotone_and_exact(model, data):
    full = project(model, data, n_components=model.eigen_coeffs.shape[0])
    target = np.hstack(data.evaluate())
    errs = []
    for r in (0, 1, 2, 4, 8, 16, full.r):
        rec = np.hstack(reconstruct(model, full.scores[:, :r]))
        errs.append(np.linalg.norm(rec - target))
    assert all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-6 * np.linalg.norm(target)
    zero = np.hstack(reconstruct(model, np.zeros((1, 2))))
    assert_allclose(zero[0], np.hstack(model.mean_function()), atol=1e-12)


def test_one_component_residual_matches_variance_bookkeeping(data, model):
    xi = project(model, data, n_components=1).scores
    resid = data.stacked() - (model.mean_coeffs + xi @ model.eigen_coeffs[:1])
    err = np.einsum("ij,jk,ik->", resid, model.weight, resid) / (data.N - 1)
    assert err == pytest.approx(model.eigenvalues.sum() - model.eigenvalues[0], rel=0.02)


def test_rank_one_dataset():
    spec = BasisSpec.uniform(100, 10)
    f = np.sin(np.linspace(0, 3, 10)) + 1
    c = np.linspace(0.5, 2.0, 15)
    coefs = [np.outer(c, f), np.outer(c, 2 * f), np.outer(c, -f)]
    m = fit_mfpca(SmoothedDataset(coefs, [spec] * 3, np.ones(3)), 0.9)
    assert np.sum(m.eigenvalues > 1e-10) == 1
    assert m.explained[0] == pytest.approx(1.0)
    assert m.n_components == 1


def test_two_orthogonal_modes_ratio():
    T, n = 200, 200
    rng = np.random.default_rng(11)
    g = epoch_grid(T)
    spec = BasisSpec.uniform(T, 20)
    # modes orthonormal in L2 over the three stacked variables
    m1 = np.sin(2 * np.pi * g / T)
    m2 = np.cos(2 * np.pi * g / T)
    a = rng.normal(0, 2.0, n)
    a -= a.mean()
    a *= 2.0 / a.std(ddof=1)
    b = rng.normal(0, 1.0, n)
    b -= b.mean()
    b -= (a @ b) / (a @ a) * a
    b /= b.std(ddof=1)
    curves = [np.outer(a, m1) + np.outer(b, m2), np.zeros((n, T)), np.zeros((n, T))]
    curves[1][:] = 0.5 * np.outer(a, m1)
    curves[2][:] = 0.5 * np.outer(b, m2)
    from stepclust.smoothing import fit_basis

    sm = SmoothedDataset([fit_basis(c, spec) for c in curves], [spec] * 3, np.ones(3))
    model = fit_mfpca(sm, 0.99)
    lam_ref, *_ = dense_mfpca(sm, m=2001)
    assert model.eigenvalues[0] / model.eigenvalues[1] == pytest.approx(lam_ref[0] / lam_ref[1], rel=1e-4)
    assert model.eigenvalues[0] / model.eigenvalues[1] == pytest.approx(4.0, rel=0.05)


def test_dense_grid_oracle_small(data, model):
    lam_ref, psi_ref, grids, w = dense_mfpca(data, m=2001)
    lead = 4
    assert_allclose(model.eigenvalues[:lead], lam_ref[:lead], rtol=1e-4)
    dense = np.hstack(model.eigenfunctions(grids[0], lead))
    for r in range(lead):
        d = min(np.sqrt(np.sum(w * (dense[r] - s * psi_ref[r]) ** 2)) for s in (1, -1))
        assert d < 1e-3


def test_errors(data):
    one = SmoothedDataset([c[:1] for c in data.coefficients], data.bases, data.scale)
    with pytest.raises(InsufficientDataError):
        fit_mfpca(one)
    same = SmoothedDataset([np.repeat(c[:1], 5, axis=0) for c in data.coefficients], data.bases, data.scale)
    with pytest.raises(DegenerateVarianceError):
        fit_mfpca(same)
    with pytest.raises(ContractError):
        fit_mfpca(data, 0.0)
    m = fit_mfpca(data)
    other = smoothed_from_counts(random_feature_data(5, 200, seed=1), n_basis=12)
    with pytest.raises(ContractError):
        project(m, other)
    with pytest.raises(ContractError):
        reconstruct(m, np.zeros((1, m.eigen_coeffs.shape[0] + 1)))


def test_json_round_trip_and_determinism(tmp_path, data, model):
    p = tmp_path / "m.json"
    model.save(p)
    back = MfpcaModel.load(p)
    assert_allclose(project(back, data).scores, project(model, data).scores, rtol=0, atol=0)
    again = fit_mfpca(data, 0.9)
    assert np.array_equal(again.eigen_coeffs, model.eigen_coeffs)
    assert isinstance(project(model, data), ScoreMatrix)
