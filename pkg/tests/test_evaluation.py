from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score

from stepclust.errors import ContractError
from stepclust.evaluation import PartitionPair, adjusted_rand, ccr, contingency


@pytest.mark.parametrize("truth,pred,expected", [([1, 1, 2, 2], [2, 2, 1, 1], 1.0),
                                                 ([1, 1, 2, 2], [1, 2, 1, 2], 0.5),
                                                 ([0, 1, 2, 0], [0, 1, 2, 0], 1.0)])
def test_ccr_examples(truth, pred, expected):
    assert ccr(truth, pred) == expected


def test_ari_examples():
    assert adjusted_rand([1, 1, 2, 2], [1, 1, 2, 2]) == 1.0
    assert abs(adjusted_rand([1, 1, 2, 2], [1, 2, 1, 2]) - (-0.5)) < 1e-12
    assert abs(adjusted_rand([1, 1, 2, 2], [0, 0, 0, 0])) < 1e-12


def test_degenerate_denominator():
    assert adjusted_rand([0, 0, 0], [5, 5, 5]) == 1.0
    assert adjusted_rand([0, 1, 2], [2, 0, 1]) == 1.0
    assert adjusted_rand([0], [0]) == 1.0
    assert adjusted_rand([0, 0, 0], [0, 1, 2]) == 0.0


def test_contract():
    with pytest.raises(ContractError):
        ccr([0, 1], [0, 1, 1])
    with pytest.raises(ContractError):
        adjusted_rand([0, -1], [0, 1])
    with pytest.raises(ContractError):
        PartitionPair(np.array([0.5, 1]), np.array([0, 1]))
    assert ccr(PartitionPair(np.array([0, 1]), np.array([1, 0]))) == 1.0


def brute_ccr(t, p):
    tu, pu = np.unique(t), np.unique(p)
    best = 0
    pad = list(pu) + [None] * max(0, len(tu) - len(pu))
    for perm in permutations(pad, len(tu)):
        best = max(best, sum(np.sum((t == a) & (p == b)) for a, b in zip(tu, perm) if b is not None))
    return best / t.size


labels = st.lists(st.integers(0, 4), min_size=1, max_size=30)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_against_oracles(data):
    t = np.array(data.draw(labels))
    p = np.array(data.draw(st.lists(st.integers(0, 4), min_size=t.size, max_size=t.size)))
    assert adjusted_rand(t, p) == pytest.approx(adjusted_rand_score(t, p), abs=1e-12)
    assert ccr(t, p) == pytest.approx(brute_ccr(t, p))
    assert adjusted_rand(t, p) == adjusted_rand(p, t)
    # the m cyclic matchings of the padded m x m table cover every item once
    m = max(len(np.unique(t)), len(np.unique(p)))
    assert ccr(t, p) >= 1 / m - 1e-12
    if len(np.unique(p)) <= len(np.unique(t)):
        assert ccr(t, p) >= 1 / len(np.unique(t)) - 1e-12
    same_up_to_relabel = len(np.unique(t)) == len(np.unique(p)) == contingency(t, p).astype(bool).sum()
    assert (adjusted_rand(t, p) == 1.0) == bool(same_up_to_relabel)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_relabeling_invariance(data):
    t = np.array(data.draw(labels))
    p = np.array(data.draw(st.lists(st.integers(0, 4), min_size=t.size, max_size=t.size)))
    perm = np.array(data.draw(st.permutations(range(5))))
    assert adjusted_rand(perm[t], p) == adjusted_rand(t, p)
    assert adjusted_rand(t, perm[p]) == adjusted_rand(t, p)
    assert ccr(perm[t], p) == ccr(t, p)
    assert ccr(t, perm[p]) == ccr(t, p)


def test_large_n_no_overflow():
    t = np.repeat([0, 1], 2_000_000)
    assert adjusted_rand(t, t) == 1.0
