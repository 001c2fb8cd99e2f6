"""Seeded generators for the five synthetic benchmark families.

Step-like families produce zero-inflated integer counts on a 1440-minute day:
a normal draw fixes how many epochs are active, the active epochs are placed
in family-specific windows, and each active epoch gets a floored exponential
count. Sinusoidal and Doppler families produce real-valued curves.

Every curve draws from its own ``SeedSequence(seed, spawn_key=(i,))`` stream,
so output does not depend on generation order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, ContractError
from .ingest import DayMatrix, write_day_matrix

FAMILIES = ("step-amount", "step-intensity", "step-pattern", "sinusoidal", "doppler")

DEFAULTS = {
    "step-amount": {
        "n_per_group": (100, 100, 100),
        "T": 1440,
        "params": {"mu": [150.0, 250.0, 350.0], "sigma2": 15.0, "lam": 32.5, "split": [0.75, 0.21, 0.04]},
    },
    "step-intensity": {
        "n_per_group": (100, 100, 100),
        "T": 1440,
        "params": {"mu": 150.0, "sigma2": 10.0, "lam": 20.0, "split": [0.2, 0.3, 0.5]},
    },
    "step-pattern": {
        "n_per_group": (100, 100, 100),
        "T": 1440,
        "params": {
            "mu": 250.0,
            "sigma2": 15.0,
            "lam": 32.5,
            "proportions": [[0.45, 0.35, 0.20], [0.35, 0.45, 0.20], [0.20, 0.35, 0.45]],
        },
    },
    "sinusoidal": {
        "n_per_group": (50, 50, 50, 50),
        "T": 1024,
        "params": {"a": [1.0, 1.1, 1.2, 1.3], "sigma2": 0.5, "freq": 5.0},
    },
    "doppler": {
        "n_per_group": (50, 50, 50, 50),
        "T": 512,
        "params": {"t0": [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], "noise_sd": 0.05},
    },
}


@dataclass(frozen=True)
class SimSpec:
    family: str
    n_per_group: tuple = ()
    T: int = 0
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        d = DEFAULTS[self.family]
        if not self.n_per_group:
            object.__setattr__(self, "n_per_group", tuple(d["n_per_group"]))
        object.__setattr__(self, "n_per_group", tuple(int(n) for n in self.n_per_group))
        if not self.T:
            object.__setattr__(self, "T", d["T"])
        merged = dict(d["params"])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)
        if any(n < 1 for n in self.n_per_group):
            raise ConfigError("every group needs at least one curve")
        if self.family.startswith("step") and self.T % 24:
            raise ConfigError(f"step families need T divisible by 24, got {self.T}")

    @property
    def n_groups(self) -> int:
        return len(self.n_per_group)

    def to_dict(self) -> dict:
        return {"family": self.family, "n_per_group": list(self.n_per_group), "T": self.T,
                "seed": self.seed, "params": self.params}

    @classmethod
    def from_dict(cls, d) -> "SimSpec":
        return cls(d["family"], tuple(d.get("n_per_group", ())), int(d.get("T", 0)),
                   int(d.get("seed", 0)), dict(d.get("params", {})))


@dataclass(frozen=True)
class LabeledDataset:
    matrix: DayMatrix
    truth: np.ndarray
    spec: SimSpec


def curve_rng(seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(i),)))


def _hours(T, a, b):
    """1-based epochs of the clock interval [a, b) hours, for a T-epoch day."""
    h = T // 24
    return np.arange(int(a * h) + 1, int(b * h) + 1)


def _active_count(rng, mu, sigma2):
    while True:
        n = int(np.floor(rng.normal(mu, np.sqrt(sigma2))))
        if n > 0:
            return n


def _quotas(n, fractions):
    q = [int(np.floor(n * f)) for f in fractions]
    q[int(np.argmax(fractions))] += n - sum(q)
    return q


def _place(rng, n, windows, fractions):
    picks = []
    for quota, window in zip(_quotas(n, fractions), windows):
        if quota > window.size:
            raise ConfigError(f"cannot place {quota} active epochs in a window of {window.size}")
        picks.append(rng.choice(window, size=quota, replace=False))
    return np.concatenate(picks)


def _fill(rng, T, epochs, lam):
    y = np.zeros(T, dtype=np.int64)
    y[epochs - 1] = np.floor(rng.exponential(lam, size=epochs.size)).astype(np.int64)
    return y


def _block(rng, T, a, b, width_hours):
    """One uniformly chosen aligned sub-interval of ``width_hours`` inside [a, b)."""
    starts = np.arange(a, b, width_hours)
    s = int(starts[rng.integers(starts.size)])
    return _hours(T, s, s + width_hours)


def _dense_block(rng, T, quota, a, b, width_hours):
    """Aligned sub-interval inside [a, b); overflow beyond its capacity spills
    into the following sub-intervals (cyclically within [a, b))."""
    starts = np.arange(a, b, width_hours)
    first = int(rng.integers(starts.size))
    chosen = []
    capacity = 0
    j = first
    while capacity < quota:
        s = int(starts[j % starts.size])
        block = _hours(T, s, s + width_hours)
        take = min(block.size, quota - capacity)
        chosen.append(rng.choice(block, size=take, replace=False) if take < block.size else block)
        capacity += take
        j += 1
        if j - first > starts.size:
            raise ConfigError("quota exceeds the window")
    return np.concatenate(chosen)


def _step_amount(rng, spec, k):
    p = spec.params
    T = spec.T
    n = _active_count(rng, p["mu"][k], p["sigma2"])
    windows = [
        _hours(T, 8, 16),
        np.concatenate([_hours(T, 4, 8), _hours(T, 16, 20)]),
        np.concatenate([_hours(T, 0, 4), _hours(T, 20, 24)]),
    ]
    return _fill(rng, T, _place(rng, n, windows, p["split"]), p["lam"])


def _step_intensity(rng, spec, k):
    p = spec.params
    T = spec.T
    n = _active_count(rng, p["mu"], p["sigma2"])
    if k == 0:
        windows = [_hours(T, 0, 8), _hours(T, 8, 16), _hours(T, 16, 24)]
        return _fill(rng, T, _place(rng, n, windows, p["split"]), p["lam"])
    q = _quotas(n, p["split"])
    wide = 4 if k == 1 else 2
    tail = 2 if k == 1 else 1
    morning = _block(rng, T, 0, 8, wide)
    midday = _block(rng, T, 8, 16, wide)
    epochs = [
        rng.choice(morning, size=q[0], replace=False),
        rng.choice(midday, size=q[1], replace=False),
        _dense_block(rng, T, q[2], 16, 24, tail),
    ]
    return _fill(rng, T, np.concatenate(epochs), p["lam"])


def _step_pattern(rng, spec, k):
    p = spec.params
    T = spec.T
    n = _active_count(rng, p["mu"], p["sigma2"])
    windows = [_hours(T, 0, 8), _hours(T, 8, 16), _hours(T, 16, 24)]
    return _fill(rng, T, _place(rng, n, windows, p["proportions"][k]), p["lam"])


def _grid(T):
    return np.arange(T) / T


def sinusoid_mean(spec, k):
    """Noiseless group-k sinusoidal curve."""
    p = spec.params
    return p["a"][k] * np.abs(np.sin(p["freq"] * _grid(spec.T)))


def doppler_mean(spec, k):
    """Noiseless group-k Doppler curve; the sine term is zeroed within
    1/(4T) of the shift point."""
    t = _grid(spec.T)
    d = t - spec.params["t0"][k]
    near = np.abs(d) < 1.0 / (4 * spec.T)
    wave = np.where(near, 0.0, np.sin(2.1 * np.pi / np.where(near, 1.0, d)))
    return 0.6 + 0.6 * np.sqrt(t * (1 - t)) * wave


def _sinusoidal(rng, spec, k):
    p = spec.params
    eps = rng.normal(0.0, np.sqrt(p["sigma2"]), size=spec.T)
    return p["a"][k] * np.abs(np.sin(p["freq"] * _grid(spec.T)) + eps)


def _doppler(rng, spec, k):
    eps = rng.normal(0.0, spec.params["noise_sd"], size=spec.T)
    return doppler_mean(spec, k) + eps


_GENERATORS = {
    "step-amount": _step_amount,
    "step-intensity": _step_intensity,
    "step-pattern": _step_pattern,
    "sinusoidal": _sinusoidal,
    "doppler": _doppler,
}


def generate(spec: SimSpec) -> LabeledDataset:
    gen = _GENERATORS[spec.family]
    rows, truth, ids = [], [], []
    i = 0
    for k, n in enumerate(spec.n_per_group):
        for j in range(n):
            rows.append(gen(curve_rng(spec.seed, i), spec, k))
            truth.append(k)
            ids.append(f"g{k + 1}_{j + 1:04d}")
            i += 1
    counts = np.stack(rows)
    if spec.family in ("sinusoidal", "doppler"):
        # noise may push a Doppler curve a hair below zero; counts must be non-negative
        counts = np.maximum(counts.astype(np.float64), 0.0)
    return LabeledDataset(DayMatrix(ids, counts), np.asarray(truth, dtype=np.int64), spec)


def _family_generator(family):
    def gen(spec: SimSpec) -> LabeledDataset:
        if spec.family != family:
            raise ContractError(f"expected a {family} spec, got {spec.family}")
        return generate(spec)

    gen.__name__ = "gen_" + family.replace("-", "_")
    return gen


gen_step_amount = _family_generator("step-amount")
gen_step_intensity = _family_generator("step-intensity")
gen_step_pattern = _family_generator("step-pattern")
gen_sinusoidal = _family_generator("sinusoidal")
gen_doppler = _family_generator("doppler")


def write_dataset(ds: LabeledDataset, path) -> tuple:
    """Write the wide CSV plus ``<stem>.truth.csv`` and ``<stem>.spec.json``."""
    path = Path(path)
    write_day_matrix(ds.matrix, path)
    truth_path = path.with_name(path.stem + ".truth.csv")
    with open(truth_path, "w", encoding="utf-8") as fh:
        fh.write("day_id,group\n")
        for d, g in zip(ds.matrix.day_ids, ds.truth):
            fh.write(f"{d},{int(g) + 1}\n")
    spec_path = path.with_name(path.stem + ".spec.json")
    with open(spec_path, "w", encoding="utf-8") as fh:
        json.dump(ds.spec.to_dict(), fh, indent=1)
    return path, truth_path, spec_path


def read_truth(path) -> dict:
    out = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header != ["day_id", "group"]:
            raise ConfigError(f"{path}: truth header must be day_id,group")
        for line in fh:
            if line.strip():
                d, g = line.strip().split(",")
                out[d] = int(g)
    return out
