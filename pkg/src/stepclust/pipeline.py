"""End-to-end runs: features -> smoothing -> MFPCA -> clustering."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .clustering import ClusterResult, GapCurve, cluster, gap_statistic
from .errors import ConfigError, StageError, StepClustError
from .evaluation import adjusted_rand, ccr
from .features import FeatureSet, compute_features
from .ingest import DayMatrix, validate_grid
from .mfpca import MfpcaModel, ScoreMatrix, fit_mfpca, project
from .simulation import FAMILIES, SimSpec, generate
from .smoothing import DEFAULT_N_BASIS, SmoothedDataset, smooth

log = logging.getLogger(__name__)

METHODS = ("kmeans", "pam")


@dataclass
class PipelineConfig:
    q1: int = 8
    q2: int = 4
    variance_threshold: float = 0.90
    k: Optional[int] = None
    method: str = "kmeans"
    n_basis: tuple = (DEFAULT_N_BASIS,) * 3
    seed: int = 0
    b_gap: int = 20
    k_max: int = 10
    restarts: int = 25  # K-means restarts; PAM uses clustering.PAM_RESTARTS

    def __post_init__(self):
        if isinstance(self.n_basis, (int, np.integer)):
            self.n_basis = (int(self.n_basis),) * 3
        self.n_basis = tuple(int(r) for r in self.n_basis)
        if len(self.n_basis) == 1:
            self.n_basis = self.n_basis * 3
        if len(self.n_basis) != 3:
            raise ConfigError("n_basis needs one entry per variable (3)")
        if int(self.q1) < 1 or int(self.q2) < 1:
            raise ConfigError("q1 and q2 must be positive integers")
        if not 0.0 < float(self.variance_threshold) <= 1.0:
            raise ConfigError("variance_threshold must lie in (0, 1]")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.k is not None and int(self.k) < 1:
            raise ConfigError("k must be positive")
        if self.b_gap < 1 or self.k_max < 2:
            raise ConfigError("b_gap >= 1 and k_max >= 2 required")

    def validate(self, dm: DayMatrix) -> None:
        validate_grid(dm, self.q2)

    def replace(self, **kw) -> "PipelineConfig":
        d = self.to_dict()
        d.update(kw)
        return PipelineConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_basis"] = list(self.n_basis)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path, **overrides) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from None
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(d)


@dataclass
class RunReport:
    config: dict
    n_days: int
    T: int
    k: int
    n_components: int
    cluster_sizes: list
    cluster_means: np.ndarray  # (k, T) mean raw counts per cluster
    explained: list
    eigenvalues: list
    timings: dict
    metrics: dict = field(default_factory=dict)
    gap: Optional[GapCurve] = None
    scores: Optional[ScoreMatrix] = None
    features: Optional[FeatureSet] = None
    smoothed: Optional[SmoothedDataset] = None

    def to_dict(self) -> dict:
        d = {
            "config": self.config,
            "n_days": self.n_days,
            "T": self.T,
            "k": self.k,
            "n_components": self.n_components,
            "cluster_sizes": list(self.cluster_sizes),
            "explained": list(self.explained),
            "eigenvalues": list(self.eigenvalues),
            "metrics": self.metrics,
            "timings": self.timings,
        }
        if self.gap is not None:
            d["gap"] = {
                "ks": self.gap.ks.tolist(),
                "gaps": self.gap.gaps.tolist(),
                "sks": self.gap.sks.tolist(),
                "chosen_k": self.gap.chosen_k,
            }
        return d


class _Stages:
    def __init__(self):
        self.timings = {}

    def run(self, name, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kw)
        except StepClustError as exc:
            raise StageError(name, exc) from exc
        except (ValueError, np.linalg.LinAlgError) as exc:
            raise StageError(name, exc) from exc
        self.timings[name] = time.perf_counter() - t0
        return out


def cluster_means(dm: DayMatrix, labels, k: int) -> np.ndarray:
    counts = dm.counts.astype(float)
    return np.stack([counts[labels == c].mean(axis=0) if np.any(labels == c) else np.zeros(dm.T) for c in range(k)])


def run_pipeline(data: DayMatrix, cfg: PipelineConfig | None = None, truth=None):
    """Cluster the days of ``data``.

    Returns ``(ClusterResult, MfpcaModel, RunReport)``. When ``cfg.k`` is
    unset, K is chosen by the gap statistic on the MFPC scores. With
    ``truth`` labels the report carries CCR and adjusted Rand.
    """
    cfg = cfg or PipelineConfig()
    st = _Stages()
    st.run("validate", cfg.validate, data)
    feats = st.run("features", compute_features, data, cfg.q1, cfg.q2)
    smoothed = st.run("smoothing", smooth, feats, list(cfg.n_basis))
    model = st.run("mfpca", fit_mfpca, smoothed, cfg.variance_threshold)
    scores = st.run("projection", project, model, smoothed)
    gap = None
    k = cfg.k
    if k is None:
        kw = {"restarts": cfg.restarts} if cfg.method == "kmeans" else {}
        gap = st.run("gap", gap_statistic, scores.scores, cfg.k_max, cfg.b_gap, cfg.method, cfg.seed, **kw)
        k = gap.chosen_k
    if k > data.N:
        raise StageError("clustering", ConfigError(f"k={k} exceeds the number of days N={data.N}"))
    kw = {"restarts": cfg.restarts} if cfg.method == "kmeans" else {}
    result = st.run("clustering", cluster, scores.scores, k, cfg.method, cfg.seed, **kw)
    metrics = {}
    if truth is not None:
        truth = np.asarray(truth)
        metrics = {"ccr": ccr(truth, result.labels), "arand": adjusted_rand(truth, result.labels)}
    report = RunReport(
        config=cfg.to_dict(),
        n_days=data.N,
        T=data.T,
        k=int(k),
        n_components=model.n_components,
        cluster_sizes=result.sizes.tolist(),
        cluster_means=cluster_means(data, result.labels, k),
        explained=model.explained.tolist(),
        eigenvalues=model.eigenvalues.tolist(),
        timings=st.timings,
        metrics=metrics,
        gap=gap,
        scores=scores,
        features=feats,
        smoothed=smoothed,
    )
    return result, model, report


def replicate_seed(seed: int, family: str, replicate: int) -> int:
    ss = np.random.SeedSequence([int(seed), FAMILIES.index(family), int(replicate)])
    return int(ss.generate_state(1)[0])


def _summary(values):
    v = np.asarray(values, dtype=float)
    sd = float(v.std(ddof=1)) if v.size > 1 else 0.0
    return float(v.mean()), sd


def run_benchmark(
    families: Sequence[str] = FAMILIES,
    methods: Sequence[str] = METHODS,
    replicates: int = 20,
    seed: int = 0,
    cfg: PipelineConfig | None = None,
    n_per_group: Optional[Sequence[int]] = None,
    progress=None,
):
    """Simulate, cluster with the true K, and score every replicate.

    Returns ``(rows, table)``: per-replicate rows and per (family, method)
    means and standard deviations of CCR and adjusted Rand.
    """
    if replicates < 1:
        raise ConfigError("replicates must be >= 1")
    cfg = cfg or PipelineConfig()
    rows = []
    for fam in families:
        for r in range(replicates):
            spec = SimSpec(fam, tuple(n_per_group or ()), seed=replicate_seed(seed, fam, r))
            ds = generate(spec)
            for method in methods:
                run_cfg = cfg.replace(method=method, k=spec.n_groups, seed=spec.seed)
                result, _, report = run_pipeline(ds.matrix, run_cfg, truth=ds.truth)
                rows.append({"generator": fam, "method": method, "replicate": r,
                             "ccr": report.metrics["ccr"], "arand": report.metrics["arand"]})
                if progress:
                    progress(rows[-1])
    table = []
    for fam in families:
        for method in methods:
            sel = [row for row in rows if row["generator"] == fam and row["method"] == method]
            cm, cs = _summary([row["ccr"] for row in sel])
            am, asd = _summary([row["arand"] for row in sel])
            table.append({"generator": fam, "method": method, "replicates": len(sel),
                          "ccr_mean": cm, "ccr_sd": cs, "arand_mean": am, "arand_sd": asd})
    return rows, table


def sensitivity_sweep(data: DayMatrix, q1_values: Sequence[int], cfg: PipelineConfig | None = None):
    """Cluster once per ``q1`` at a fixed K and compare label vectors pairwise.

    Returns ``(labels_by_q1, table)`` where table rows are
    ``{"q1_a", "q1_b", "arand"}`` for every unordered pair of runs.
    """
    cfg = cfg or PipelineConfig(k=4)
    if cfg.k is None:
        raise ConfigError("sensitivity sweep needs a fixed k")
    if len(q1_values) < 1:
        raise ConfigError("need at least one q1 value")
    labels = []
    for q1 in q1_values:
        result, _, _ = run_pipeline(data, cfg.replace(q1=int(q1)))
        labels.append((int(q1), result.labels))
    table = [{"q1_a": a, "q1_b": b, "arand": adjusted_rand(la, lb)}
             for (a, la), (b, lb) in combinations(labels, 2)]
    return labels, table
