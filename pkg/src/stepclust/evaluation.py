"""Agreement between a clustering and ground-truth labels."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ContractError


@dataclass(frozen=True)
class PartitionPair:
    truth: np.ndarray
    predicted: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.truth)
        p = np.asarray(self.predicted)
        if t.ndim != 1 or p.ndim != 1 or t.shape != p.shape:
            raise ContractError(f"label vectors differ in shape: {t.shape} vs {p.shape}")
        for name, v in (("truth", t), ("predicted", p)):
            if v.size and (v.dtype.kind not in "iu" and not np.all(np.mod(v, 1) == 0) or np.any(v < 0)):
                raise ContractError(f"{name} labels must be non-negative integers")
        object.__setattr__(self, "truth", t.astype(np.int64))
        object.__setattr__(self, "predicted", p.astype(np.int64))


def contingency(truth, predicted) -> np.ndarray:
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(predicted, return_inverse=True)
    table = np.zeros((ti.max() + 1, pi.max() + 1), dtype=np.int64)
    np.add.at(table, (ti, pi), 1)
    return table


def _pair(truth, predicted):
    if predicted is None and isinstance(truth, PartitionPair):
        return truth
    return PartitionPair(np.asarray(truth), np.asarray(predicted))


def ccr(truth, predicted=None) -> float:
    """Correct classification rate under the best one-to-one cluster mapping."""
    pair = _pair(truth, predicted)
    n = pair.truth.size
    if n == 0:
        raise ContractError("empty partitions")
    table = contingency(pair.truth, pair.predicted)
    side = max(table.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum()) / n


def adjusted_rand(truth, predicted=None) -> float:
    """Adjusted Rand index (pair-counting, chance-corrected), with exact integer pair counts."""
    pair = _pair(truth, predicted)
    n = pair.truth.size
    table = contingency(pair.truth, pair.predicted)
    sum_ij = sum(comb(int(v), 2) for v in table.ravel())
    sum_a = sum(comb(int(v), 2) for v in table.sum(axis=1))
    sum_b = sum(comb(int(v), 2) for v in table.sum(axis=0))
    total = comb(n, 2)
    # denominators scaled by 2 * total to stay in integers
    num = 2 * (sum_ij * total - sum_a * sum_b)
    den = total * (sum_a + sum_b) - 2 * sum_a * sum_b
    if den == 0:
        same = table.shape[0] == table.shape[1] == np.count_nonzero(table)
        return 1.0 if same else 0.0
    return num / den
