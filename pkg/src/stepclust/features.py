"""The three functional variables built from one day of step counts.

* cumulative sum ``S(t)``: the amount of activity,
* ordered quantile slope ``I_Q(t)``: intensity with time-of-day removed,
* mean score ``P_Q(t)``: time-of-day pattern with amount removed.

All integrals are prefix sums over unit-width epochs. Days with zero total
activity map to all-zero curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels_numpy as ref
from . import kernels
from .errors import ConfigError, ContractError, DegenerateDayError
from .ingest import DayMatrix, StepDay

VARIABLES = ("amount", "intensity", "pattern")


@dataclass(frozen=True)
class QuantileProfile:
    q: int
    times: np.ndarray  # 1-based epochs, times[0] == 0
    total: float


@dataclass(frozen=True)
class FeatureTriple:
    s_curve: np.ndarray
    i_curve: np.ndarray
    p_curve: np.ndarray
    q1: int
    q2: int

    def as_array(self) -> np.ndarray:
        return np.stack([self.s_curve, self.i_curve, self.p_curve])


@dataclass(frozen=True)
class FeatureSet:
    """Feature curves for a whole :class:`DayMatrix`; ``curves`` is ``(3, N, T)``."""

    curves: np.ndarray
    q1: int
    q2: int
    day_ids: tuple

    @property
    def N(self) -> int:
        return self.curves.shape[1]

    @property
    def T(self) -> int:
        return self.curves.shape[2]

    def triple(self, i: int) -> FeatureTriple:
        s, inten, p = self.curves[:, i]
        return FeatureTriple(s, inten, p, self.q1, self.q2)


def _counts(day) -> np.ndarray:
    if isinstance(day, StepDay):
        day = day.counts
    return np.asarray(day, dtype=np.float64)


def _check_q(q, name):
    if int(q) != q or q < 1:
        raise ConfigError(f"{name} must be a positive integer, got {q}")
    return int(q)


def cumulative_sum(day) -> np.ndarray:
    return np.cumsum(_counts(day))


def quantile_times(s_curve, q: int) -> QuantileProfile:
    """Activity-time quantiles: the first epoch reaching each k/q of the total."""
    q = _check_q(q, "q")
    s = np.asarray(s_curve, dtype=np.float64)
    times = ref.quantile_times(s, q)
    if times is None:
        raise DegenerateDayError("quantiles undefined for a day with zero total activity")
    return QuantileProfile(q, times, float(s[-1]))


def quantile_slope(profile: QuantileProfile, T: int) -> np.ndarray:
    """Piecewise-constant slope ``(total/q) / segment length``.

    A segment whose two quantile times coincide is given a one-epoch
    denominator and occupies the epoch where the quantile is reached.
    """
    if profile.times[-1] > T:
        raise ContractError(f"quantile time {profile.times[-1]} beyond T={T}")
    return ref.quantile_slope(profile.times, profile.total, profile.q, int(T))


def ordered_quantile_slope(day, q1: int) -> np.ndarray:
    s = cumulative_sum(day)
    try:
        profile = quantile_times(s, q1)
    except DegenerateDayError:
        return np.zeros_like(s)
    return np.sort(quantile_slope(profile, s.shape[0]))


def mean_score(day, q2: int) -> np.ndarray:
    """Block means of the per-epoch ordered-activity quantile band ``u(t)``.

    ``u(t) = k`` when the ascending (stable) rank of epoch ``t`` falls in
    ``(T_(k/q2), T_((k+1)/q2)]`` of the sorted cumulative sum.
    """
    q2 = _check_q(q2, "q2")
    x = _counts(day)
    if x.shape[0] % q2:
        raise ConfigError(f"T={x.shape[0]} is not divisible by q2={q2}")
    return ref.mean_score(x, q2)


def feature_triple(day, q1: int = 8, q2: int = 4) -> FeatureTriple:
    q1 = _check_q(q1, "q1")
    return FeatureTriple(cumulative_sum(day), ordered_quantile_slope(day, q1), mean_score(day, q2), q1, q2)


def compute_features(dm: DayMatrix, q1: int = 8, q2: int = 4) -> FeatureSet:
    """Batch feature construction through the compiled kernel."""
    q1 = _check_q(q1, "q1")
    q2 = _check_q(q2, "q2")
    if dm.T % q2:
        raise ConfigError(f"T={dm.T} is not divisible by q2={q2}")
    S, I, P = kernels.features_batch(dm.counts, q1, q2)
    return FeatureSet(np.stack([S, I, P]), q1, q2, tuple(dm.day_ids))
