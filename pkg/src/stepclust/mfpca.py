"""Multivariate functional PCA in basis-coefficient space.

With per-variable Gram matrices ``G_k`` stacked block-diagonally into ``W``,
the covariance operator of the multivariate curves acts on coefficient
vectors as ``Cov(c) W``. Its eigenproblem is symmetrized as
``W^{1/2} Cov(c) W^{1/2} v = lambda v`` and eigenfunction coefficients are
recovered as ``W^{-1/2} v``, which are orthonormal under ``<f, g> = f' W g``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import ContractError, DegenerateVarianceError, FitError, InsufficientDataError
from .smoothing import BasisSpec, SmoothedDataset, epoch_grid

EIG_FLOOR = 1e-12


@dataclass(frozen=True)
class ScoreMatrix:
    scores: np.ndarray  # (N, r)
    day_ids: tuple = ()

    @property
    def r(self) -> int:
        return self.scores.shape[1]


@dataclass
class MfpcaModel:
    bases: list
    scale: np.ndarray
    mean_coeffs: np.ndarray  # stacked, (sum R_k,)
    eigen_coeffs: np.ndarray  # (n_all, sum R_k); row r is psi_r
    eigenvalues: np.ndarray  # (n_all,), non-increasing
    explained: np.ndarray  # cumulative ratios, (n_all,)
    n_components: int
    variance_threshold: float = 0.9
    _weight: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    @property
    def sizes(self) -> list:
        return [b.n_basis for b in self.bases]

    @property
    def weight(self) -> np.ndarray:
        if self._weight is None:
            self._weight = block_diag(*[b.gram() for b in self.bases])
        return self._weight

    def split(self, stacked: np.ndarray) -> list:
        """Split stacked coefficient rows into per-variable blocks."""
        return np.split(stacked, np.cumsum(self.sizes)[:-1], axis=-1)

    def eigenfunctions(self, grid=None, n: int | None = None) -> list:
        """Per variable, ``(n, len(grid))`` eigenfunction values."""
        n = self.n_components if n is None else n
        out = []
        for c, b in zip(self.split(self.eigen_coeffs[:n]), self.bases):
            g = epoch_grid(int(round(b.T))) if grid is None else grid
            out.append(c @ b.design(g).T)
        return out

    def mean_function(self, grid=None) -> list:
        out = []
        for c, b in zip(self.split(self.mean_coeffs), self.bases):
            g = epoch_grid(int(round(b.T))) if grid is None else grid
            out.append(c @ b.design(g).T)
        return out

    def to_dict(self) -> dict:
        return {
            "bases": [b.to_dict() for b in self.bases],
            "scale": self.scale.tolist(),
            "mean_coeffs": self.mean_coeffs.tolist(),
            "eigen_coeffs": self.eigen_coeffs.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "explained": self.explained.tolist(),
            "n_components": int(self.n_components),
            "variance_threshold": float(self.variance_threshold),
        }

    @classmethod
    def from_dict(cls, d) -> "MfpcaModel":
        return cls(
            bases=[BasisSpec.from_dict(b) for b in d["bases"]],
            scale=np.asarray(d["scale"], dtype=float),
            mean_coeffs=np.asarray(d["mean_coeffs"], dtype=float),
            eigen_coeffs=np.asarray(d["eigen_coeffs"], dtype=float),
            eigenvalues=np.asarray(d["eigenvalues"], dtype=float),
            explained=np.asarray(d["explained"], dtype=float),
            n_components=int(d["n_components"]),
            variance_threshold=float(d.get("variance_threshold", 0.9)),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "MfpcaModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _sqrt_weight(W):
    w, V = np.linalg.eigh(W)
    if w.min() < -1e-8 * max(w.max(), 1.0):
        return None
    w = np.maximum(w, EIG_FLOOR)
    return (V * np.sqrt(w)) @ V.T, (V / np.sqrt(w)) @ V.T


def fit_mfpca(data: SmoothedDataset, variance_threshold: float = 0.9) -> MfpcaModel:
    """Estimate mean, eigenvalues and eigenfunctions; keep enough components
    to reach ``variance_threshold`` of the total variance."""
    if not 0.0 < variance_threshold <= 1.0:
        raise ContractError(f"variance_threshold must be in (0, 1], got {variance_threshold}")
    N = data.N
    if N < 2:
        raise InsufficientDataError(f"MFPCA needs at least 2 observations, got {N}")
    coef = data.stacked()
    mean = coef.mean(axis=0)
    C = coef - mean
    W = block_diag(*data.grams)
    roots = _sqrt_weight(W)
    if roots is None:
        jitter = 1e-10 * np.trace(W) / W.shape[0]
        roots = _sqrt_weight(W + jitter * np.eye(W.shape[0]))
        if roots is None:
            raise FitError("basis Gram matrix is not positive semidefinite")
    Wh, Wih = roots
    A = C @ Wh
    M = A.T @ A / (N - 1)
    lam, V = np.linalg.eigh(0.5 * (M + M.T))
    order = np.argsort(lam, kind="stable")[::-1]
    lam = np.clip(lam[order], 0.0, None)
    V = V[:, order]
    total = lam.sum()
    if not total > 1e-14:
        raise DegenerateVarianceError("all curves are identical after standardization; no variance to decompose")
    psi = (Wih @ V).T
    signs = np.where(psi.sum(axis=1) < 0, -1.0, 1.0)
    psi *= signs[:, None]
    explained = np.minimum(np.cumsum(lam) / total, 1.0)
    n_comp = int(np.searchsorted(explained, variance_threshold - 1e-12, side="left")) + 1
    n_comp = min(n_comp, int(np.count_nonzero(lam > 0)))
    return MfpcaModel(
        bases=list(data.bases),
        scale=np.asarray(data.scale, dtype=float),
        mean_coeffs=mean,
        eigen_coeffs=psi,
        eigenvalues=lam,
        explained=explained,
        n_components=max(n_comp, 1),
        variance_threshold=float(variance_threshold),
    )


def project(model: MfpcaModel, data: SmoothedDataset, n_components: int | None = None) -> ScoreMatrix:
    """Scores ``xi_ir = <Z_i - mu, psi_r>`` for the retained components."""
    if [b.to_dict() for b in data.bases] != [b.to_dict() for b in model.bases]:
        raise ContractError("dataset basis does not match the model basis")
    r = model.n_components if n_components is None else int(n_components)
    C = data.stacked() - model.mean_coeffs
    xi = C @ model.weight @ model.eigen_coeffs[:r].T
    return ScoreMatrix(xi, tuple(data.day_ids))


def reconstruct(model: MfpcaModel, scores, grid=None) -> list:
    """Truncated expansion ``mu + sum_r xi_r psi_r`` evaluated per variable."""
    xi = scores.scores if isinstance(scores, ScoreMatrix) else np.asarray(scores, dtype=float)
    xi = np.atleast_2d(xi)
    if xi.shape[1] > model.eigen_coeffs.shape[0]:
        raise ContractError("more scores than available components")
    coef = model.mean_coeffs + xi @ model.eigen_coeffs[: xi.shape[1]]
    out = []
    for c, b in zip(model.split(coef), model.bases):
        g = epoch_grid(int(round(b.T))) if grid is None else grid
        out.append(c @ b.design(g).T)
    return out
