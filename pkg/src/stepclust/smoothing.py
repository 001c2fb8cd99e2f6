"""Max-based standardization and cubic B-spline representation of curves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import BSpline

from .errors import ContractError, FitError, ValidationError
from .features import FeatureSet, FeatureTriple

DEFAULT_N_BASIS = 30


@dataclass(frozen=True)
class BasisSpec:
    """B-spline basis on ``[0, T]`` with uniform or user-given breakpoints."""

    n_basis: int
    order: int
    knots: tuple  # breakpoints, strictly increasing, knots[0] == 0, knots[-1] == T

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=float)
        if k.ndim != 1 or k.size < 2 or np.any(np.diff(k) <= 0):
            raise ValidationError("breakpoints must be strictly increasing")
        if self.n_basis != k.size - 2 + self.order:
            raise ValidationError("n_basis must equal interior breakpoints + order")

    @classmethod
    def uniform(cls, T: float, n_basis: int = DEFAULT_N_BASIS, order: int = 4) -> "BasisSpec":
        if n_basis < order:
            raise ValidationError(f"n_basis={n_basis} smaller than spline order {order}")
        breaks = np.linspace(0.0, float(T), n_basis - order + 2)
        return cls(int(n_basis), int(order), tuple(float(b) for b in breaks))

    @property
    def T(self) -> float:
        return self.knots[-1]

    @property
    def degree(self) -> int:
        return self.order - 1

    @property
    def knot_vector(self) -> np.ndarray:
        k = np.asarray(self.knots, dtype=float)
        return np.concatenate([np.repeat(k[0], self.degree), k, np.repeat(k[-1], self.degree)])

    def design(self, grid) -> np.ndarray:
        """``len(grid) x n_basis`` matrix of basis values."""
        x = np.asarray(grid, dtype=float)
        lo, hi = self.knots[0], self.knots[-1]
        tol = 1e-9 * max(1.0, abs(hi))
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            raise ValidationError(f"abscissa outside basis domain [{lo}, {hi}]")
        x = np.clip(x, lo, hi)
        return BSpline.design_matrix(x, self.knot_vector, self.degree).toarray()

    def gram(self) -> np.ndarray:
        """Exact inner products of basis functions (Gauss-Legendre per knot span)."""
        nodes, weights = np.polynomial.legendre.leggauss(self.order)
        k = np.asarray(self.knots)
        a, b = k[:-1], k[1:]
        x = (0.5 * (b - a)[:, None] * nodes[None, :] + 0.5 * (a + b)[:, None]).ravel()
        w = (0.5 * (b - a)[:, None] * weights[None, :]).ravel()
        B = self.design(x)
        G = B.T @ (w[:, None] * B)
        return 0.5 * (G + G.T)

    def to_dict(self) -> dict:
        return {"n_basis": self.n_basis, "order": self.order, "knots": list(self.knots)}

    @classmethod
    def from_dict(cls, d) -> "BasisSpec":
        return cls(int(d["n_basis"]), int(d["order"]), tuple(float(v) for v in d["knots"]))


def epoch_grid(T: int) -> np.ndarray:
    """Abscissae of the epochs ``t = 1..T`` on the basis domain ``[0, T]``."""
    return np.arange(1, T + 1, dtype=float)


@dataclass
class SmoothedDataset:
    coefficients: list  # per variable, (N, R_k)
    bases: list  # per variable BasisSpec
    scale: np.ndarray  # per variable standardization divisor
    grams: list = field(default_factory=list)
    day_ids: tuple = ()

    def __post_init__(self):
        if not self.grams:
            self.grams = [b.gram() for b in self.bases]

    @property
    def N(self) -> int:
        return self.coefficients[0].shape[0]

    @property
    def n_vars(self) -> int:
        return len(self.coefficients)

    def stacked(self) -> np.ndarray:
        return np.hstack(self.coefficients)

    def evaluate(self, grid=None) -> list:
        """Per-variable ``(N, len(grid))`` curves."""
        out = []
        for c, b in zip(self.coefficients, self.bases):
            g = epoch_grid(int(round(b.T))) if grid is None else grid
            out.append(c @ b.design(g).T)
        return out


def _as_curves(triples) -> np.ndarray:
    if isinstance(triples, FeatureSet):
        return triples.curves
    if isinstance(triples, np.ndarray):
        return triples
    if isinstance(triples, Sequence) and triples and isinstance(triples[0], FeatureTriple):
        return np.stack([t.as_array() for t in triples], axis=1)
    return np.asarray(triples, dtype=float)


def standardize(triples):
    """Divide each variable by the across-day mean of its per-day maxima.

    Accepts a :class:`FeatureSet`, a list of :class:`FeatureTriple` or a
    ``(n_vars, N, T)`` array. Returns the standardized ``(n_vars, N, T)``
    array and the divisors; a variable that is zero on every day keeps
    divisor 1.
    """
    curves = np.asarray(_as_curves(triples), dtype=float)
    if curves.ndim != 3 or curves.shape[1] < 1:
        raise ValidationError("expected curves shaped (n_vars, N, T) with N >= 1")
    scale = curves.max(axis=2).mean(axis=1)
    allzero = ~np.any(curves != 0, axis=(1, 2))
    scale = np.where(allzero | (scale == 0), 1.0, scale)
    return curves / scale[:, None, None], scale


def fit_basis(curve, spec: BasisSpec, grid=None) -> np.ndarray:
    """Least-squares coefficients for one curve (or each row of a 2-D array)."""
    Y = np.asarray(curve, dtype=float)
    T = Y.shape[-1]
    if T < spec.n_basis:
        raise FitError(f"{T} abscissae cannot determine {spec.n_basis} coefficients")
    B = spec.design(epoch_grid(T) if grid is None else grid)
    coef, _, rank, _ = np.linalg.lstsq(B, Y.T, rcond=None)
    if rank < spec.n_basis:
        raise FitError(f"rank-deficient design ({rank} < {spec.n_basis}); reduce n_basis")
    return coef.T


def evaluate_basis(coeffs, spec: BasisSpec, grid) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    if c.shape[-1] != spec.n_basis:
        raise ContractError(f"{c.shape[-1]} coefficients for a basis of size {spec.n_basis}")
    return c @ spec.design(grid).T


def smooth(features, n_basis=DEFAULT_N_BASIS, order: int = 4) -> SmoothedDataset:
    """Standardize feature curves and fit each variable on its own basis."""
    Z, scale = standardize(features)
    n_vars, _, T = Z.shape
    if np.isscalar(n_basis):
        n_basis = [int(n_basis)] * n_vars
    if len(n_basis) != n_vars:
        raise ValidationError(f"need {n_vars} basis sizes, got {len(n_basis)}")
    bases = [BasisSpec.uniform(T, r, order) for r in n_basis]
    coefs = [fit_basis(Z[k], bases[k]) for k in range(n_vars)]
    ids = features.day_ids if isinstance(features, FeatureSet) else ()
    return SmoothedDataset(coefs, bases, scale, day_ids=tuple(ids))
