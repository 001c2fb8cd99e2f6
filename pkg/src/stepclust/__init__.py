"""Clustering of daily step-count curves via multivariate functional PCA."""

__version__ = "0.1.0"

from ._accel import backend_name
from .clustering import ClusterResult, GapCurve, cluster, gap_statistic, kmeans, pam
from .errors import (
    ConfigError,
    ContractError,
    DegenerateDayError,
    DegenerateVarianceError,
    FitError,
    InsufficientDataError,
    ParseError,
    StageError,
    StepClustError,
    ValidationError,
)
from .evaluation import adjusted_rand, ccr
from .features import FeatureSet, FeatureTriple, compute_features, feature_triple
from .ingest import DayMatrix, StepDay, read_day_matrix, write_day_matrix
from .mfpca import MfpcaModel, ScoreMatrix, fit_mfpca, project, reconstruct
from .pipeline import PipelineConfig, RunReport, run_benchmark, run_pipeline, sensitivity_sweep
from .simulation import FAMILIES, LabeledDataset, SimSpec, generate
from .smoothing import BasisSpec, SmoothedDataset, smooth

__all__ = [name for name in dir() if not name.startswith("_")]
