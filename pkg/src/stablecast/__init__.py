"""stablecast: vertical stability and accuracy evaluation of global
forecasting models under configurable retraining schedules."""

from ._version import __version__
from .conformal import ConformalCalibrator, calibrate, central_levels_to_quantiles
from .ensemble import EnsembleSpec, ModelRanking, build_ensemble_forecasts, rank_models
from .evaluate import generate_rolling_forecasts, score_cell, validation_origin_grid
from .features import FeatureRecipe, build_features
from .forecasters import PooledRegression, SeasonalNaive, fit_pooled_linear
from .matrix import ForecastMatrix, ForecastSchema, ingest_external_forecasts
from .metrics import (
    aggregate,
    multi_quantile_change,
    multi_quantile_loss,
    quantile_change,
    quantile_loss,
    rmsse,
    smapc,
)
from .panel import (
    FrequencyProfile,
    PanelSchema,
    TimeSeriesPanel,
    filter_min_length,
    load_panel,
    save_panel,
    summarize,
)
from .pipeline import RunConfig, RunManifest, run
from .results import MetricTable, emit_table
from .schedule import (
    EvaluationConfig,
    OriginGrid,
    RetrainPlan,
    build_origin_grid,
    build_retrain_plan,
    consecutive_origin_pairs,
)
from .simulate import SynthSpec, generate
from .stats import friedman_test, nemenyi_cd, pairwise_significance, rank_blocks

__all__ = [
    "__version__",
    "ConformalCalibrator",
    "EnsembleSpec",
    "EvaluationConfig",
    "FeatureRecipe",
    "ForecastMatrix",
    "ForecastSchema",
    "FrequencyProfile",
    "MetricTable",
    "ModelRanking",
    "OriginGrid",
    "PanelSchema",
    "PooledRegression",
    "RetrainPlan",
    "RunConfig",
    "RunManifest",
    "SeasonalNaive",
    "SynthSpec",
    "TimeSeriesPanel",
    "aggregate",
    "build_ensemble_forecasts",
    "build_features",
    "build_origin_grid",
    "build_retrain_plan",
    "calibrate",
    "central_levels_to_quantiles",
    "consecutive_origin_pairs",
    "emit_table",
    "filter_min_length",
    "fit_pooled_linear",
    "friedman_test",
    "generate",
    "generate_rolling_forecasts",
    "ingest_external_forecasts",
    "load_panel",
    "multi_quantile_change",
    "multi_quantile_loss",
    "nemenyi_cd",
    "pairwise_significance",
    "quantile_change",
    "quantile_loss",
    "rank_blocks",
    "rank_models",
    "rmsse",
    "run",
    "save_panel",
    "score_cell",
    "smapc",
    "summarize",
    "validation_origin_grid",
]
