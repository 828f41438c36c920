"""Rolling-origin forecast generation and metric scoring for one model.

This is the glue between the schedule, the estimators, and the metric
functions: walk the origin grid refitting per the retrain plan, collect a
:class:`ForecastMatrix`, then score accuracy per origin and stability per
adjacent origin pair. Stability always pairs adjacent grid origins; the
overlap between two origins ``step`` apart covers ``horizon - step``
target periods, which for the default step of 1 is the usual ``h - 1``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from sklearn.base import clone

from .errors import ConfigurationError, InputError, MetricUndefinedError
from .forecasters import GlobalForecaster
from .matrix import ForecastMatrix
from .metrics import (
    MQC,
    MQL,
    QC,
    QL,
    RMSSE,
    SMAPC,
    aggregate,
    aggregate_by_series,
    quantile_change,
    quantile_loss,
    rmsse,
    smapc,
)
from .panel import TimeSeriesPanel
from .results import MetricTable
from .schedule import RETRAIN, EvaluationConfig, OriginGrid, RetrainPlan

logger = logging.getLogger(__name__)


def validation_origin_grid(series_length: int, config: EvaluationConfig) -> OriginGrid:
    """Calibration origins in the window just before the test window.

    Targets of every validation origin end before the test window starts,
    so calibration never sees test-period actuals.
    """
    if config.validation_window <= 0:
        raise ConfigurationError("config declares no validation_window")
    test_start = series_length - config.test_window
    first = test_start - config.validation_window
    last = test_start - config.horizon
    if first < 1:
        raise ConfigurationError(
            f"series length {series_length} too short for validation_window "
            f"{config.validation_window} plus test_window {config.test_window}"
        )
    return OriginGrid(origins=tuple(range(first, last + 1)), horizon=config.horizon)


def generate_rolling_forecasts(
    panel: TimeSeriesPanel,
    forecaster: GlobalForecaster,
    grid: OriginGrid,
    plan: RetrainPlan,
) -> ForecastMatrix:
    """Walk the grid, refitting at plan-marked origins and reusing the
    frozen fit (with inputs refreshed through each new origin) elsewhere."""
    if len(plan.decisions) != len(grid.origins):
        raise InputError("plan and grid cover different numbers of origins")
    matrix = ForecastMatrix(grid.horizon)
    model = None
    for k, origin in enumerate(grid.origins):
        if plan.decisions[k] == RETRAIN:
            model = clone(forecaster).fit(panel, up_to=origin)
        forecasts = model.predict(panel, origin=origin, horizon=grid.horizon)
        for sid, values in forecasts.items():
            matrix.set_point(sid, origin, values)
    return matrix


@dataclass
class CellScores:
    """Per-series metric values for one (model, scenario) cell."""

    rmsse_by_series: dict[str, list[float]] = field(default_factory=dict)
    mql_by_series: dict[str, list[float]] = field(default_factory=dict)
    ql_by_series: dict[float, dict[str, list[float]]] = field(default_factory=dict)
    smapc_by_series: dict[str, list[float]] = field(default_factory=dict)
    mqc_by_series: dict[str, list[float]] = field(default_factory=dict)
    qc_by_series: dict[float, dict[str, list[float]]] = field(default_factory=dict)
    excluded_rmsse: list[str] = field(default_factory=list)


def score_cell(
    matrix: ForecastMatrix,
    panel: TimeSeriesPanel,
    grid: OriginGrid,
    season_length: int,
) -> CellScores:
    """Score every origin (accuracy) and adjacent origin pair (stability).

    Series whose training span is seasonally periodic at some origin have
    no defined RMSSE and are excluded from that metric with a logged
    reason; all other metrics still cover them.
    """
    scores = CellScores()
    h = grid.horizon
    shift = grid.step
    overlap = h - shift
    levels = matrix.quantile_levels
    if levels and not matrix.quantiles_complete:
        raise InputError(
            "matrix declares quantile levels but some blocks carry no tracks"
        )
    if levels:
        scores.ql_by_series = {q: {} for q in levels}
        scores.qc_by_series = {q: {} for q in levels}

    for sid in matrix.series_ids():
        y = panel.values[sid]
        origins = matrix.origins(sid)
        rmsse_values: list[float] = []
        rmsse_ok = True
        for origin in origins:
            if origin + h > len(y):
                raise InputError(
                    f"series {sid!r}: no actuals for origin {origin} horizon {h}"
                )
            actuals = y[origin : origin + h]
            point = matrix.point(sid, origin)
            if rmsse_ok:
                try:
                    rmsse_values.append(rmsse(actuals, point, y[:origin], season_length))
                except MetricUndefinedError as exc:
                    rmsse_ok = False
                    scores.excluded_rmsse.append(sid)
                    logger.warning("excluding series %r from RMSSE: %s", sid, exc)
            if levels:
                tracks = matrix.quantiles(sid, origin)
                per_level = []
                for j, q in enumerate(levels):
                    value = quantile_loss(actuals, tracks[:, j], q)
                    scores.ql_by_series[q].setdefault(sid, []).append(value)
                    per_level.append(value)
                scores.mql_by_series.setdefault(sid, []).append(
                    float(sum(per_level) / len(per_level))
                )
        if rmsse_ok:
            scores.rmsse_by_series[sid] = rmsse_values

        if len(origins) >= 2 and overlap >= 1:
            for prev_origin, curr_origin in zip(origins[:-1], origins[1:]):
                curr = matrix.point(sid, curr_origin)[:overlap]
                prev = matrix.point(sid, prev_origin)[shift : shift + overlap]
                scores.smapc_by_series.setdefault(sid, []).append(smapc(curr, prev))
                if levels:
                    curr_q = matrix.quantiles(sid, curr_origin)[:overlap, :]
                    prev_q = matrix.quantiles(sid, prev_origin)[shift : shift + overlap, :]
                    per_level = []
                    for j, q in enumerate(levels):
                        value = quantile_change(curr_q[:, j], prev_q[:, j], q)
                        scores.qc_by_series[q].setdefault(sid, []).append(value)
                        per_level.append(value)
                    scores.mqc_by_series.setdefault(sid, []).append(
                        float(sum(per_level) / len(per_level))
                    )
    return scores


def add_cell_rows(
    table: MetricTable,
    model: str,
    r: int,
    scores: CellScores,
    per_series_detail: bool = True,
) -> None:
    """Append aggregate (and per-series) rows for one scored cell."""

    def emit(name: str, by_series: dict[str, list[float]], q: float | None = None):
        if not by_series:
            return
        table.add(name, aggregate(by_series), model, r, q=q)
        if per_series_detail and q is None:
            for sid, mean in aggregate_by_series(by_series).items():
                table.add(name, mean, model, r, series_id=sid)

    emit(RMSSE, scores.rmsse_by_series)
    emit(MQL, scores.mql_by_series)
    emit(SMAPC, scores.smapc_by_series)
    emit(MQC, scores.mqc_by_series)
    for q, by_series in scores.ql_by_series.items():
        emit(QL, by_series, q=q)
    for q, by_series in scores.qc_by_series.items():
        emit(QC, by_series, q=q)


def split_by_grid(
    matrix: ForecastMatrix, grid: OriginGrid
) -> ForecastMatrix:
    """Blocks of ``matrix`` whose origin lies on ``grid`` (e.g. to pull an
    external model's validation-window forecasts out of a combined file)."""
    wanted = set(grid.origins)
    out = ForecastMatrix(matrix.horizon, quantile_levels=matrix.quantile_levels)
    for sid, origin in matrix.keys():
        if origin in wanted:
            out.set_point(sid, origin, matrix.point(sid, origin))
            if matrix.has_quantile_block(sid, origin):
                out.set_quantiles(sid, origin, matrix.quantiles(sid, origin))
    return out


def require_grid_coverage(matrix: ForecastMatrix, grid: OriginGrid, panel: TimeSeriesPanel):
    """Every (series, grid origin) block must be present."""
    for sid in panel.series_ids:
        for origin in grid.origins:
            if (sid, origin) not in matrix:
                raise InputError(
                    f"forecasts missing block (series {sid!r}, origin {origin})"
                )
