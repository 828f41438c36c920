"""Global forecasting estimators trained across all series of a panel.

Both estimators follow the scikit-learn API surface (``fit`` / ``predict``
/ ``get_params``): parameters are shared across every series, never
per-series. ``fit(panel, up_to)`` trains on the first ``up_to``
observations of each series; ``predict(panel, origin, horizon)`` may be
called at any later origin, in which case the frozen parameters see inputs
refreshed through the new origin. Multi-step forecasts are recursive:
lead-``k`` features are computed from observed values through the origin
and the model's own forecasts for earlier leads.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .errors import FitError, InputError
from .features import (
    FeatureRecipe,
    build_categorical_encoders,
    build_features,
    lead_feature_matrix,
)
from .panel import TimeSeriesPanel


def _target_timestamps(panel: TimeSeriesPanel, t: int) -> np.ndarray:
    """Timestamp of target index ``t`` per series, extrapolated past the end."""
    out = np.empty(panel.n_series, dtype="datetime64[D]")
    step = panel.frequency.period_step
    for i, sid in enumerate(panel.series_ids):
        ts = panel.timestamps[sid]
        if t < len(ts):
            out[i] = ts[t]
        else:
            local = step if step is not None else (ts[-1] - ts[-2])
            out[i] = ts[-1] + (t - len(ts) + 1) * local
    return out


class GlobalForecaster(BaseEstimator):
    """Shared behaviour: fitted-state checks and the recursive predict loop."""

    kind = "abstract"

    def _check_fitted(self):
        if getattr(self, "fitted_at_origin_", None) is None:
            raise FitError(f"{type(self).__name__} is not fitted")

    def _check_predictable(self, panel: TimeSeriesPanel, origin: int, horizon: int):
        self._check_fitted()
        if origin < self.fitted_at_origin_:
            raise InputError(
                f"model fitted at origin {self.fitted_at_origin_} cannot predict "
                f"from earlier origin {origin}"
            )
        for sid in panel.series_ids:
            if origin > panel.length(sid):
                raise InputError(
                    f"origin {origin} beyond observed data for series {sid!r} "
                    f"(length {panel.length(sid)})"
                )
        if horizon < 1:
            raise InputError("horizon must be >= 1")


class SeasonalNaive(GlobalForecaster):
    """Repeat the value one season back; recursive when leads exceed it."""

    kind = "seasonal_naive"

    def __init__(self, season_length: int | None = None):
        self.season_length = season_length

    def fit(self, panel: TimeSeriesPanel, up_to: int) -> "SeasonalNaive":
        self.season_length_ = self.season_length or panel.frequency.season_length
        self.fitted_at_origin_ = int(up_to)
        return self

    def predict(
        self, panel: TimeSeriesPanel, origin: int, horizon: int
    ) -> dict[str, np.ndarray]:
        self._check_predictable(panel, origin, horizon)
        s = self.season_length_
        if origin < s:
            raise InputError(f"need at least {s} observations before origin, got {origin}")
        out = {}
        for sid in panel.series_ids:
            ext = np.empty(origin + horizon)
            ext[:origin] = panel.values[sid][:origin]
            for k in range(1, horizon + 1):
                ext[origin + k - 1] = ext[origin + k - 1 - s]
            out[sid] = ext[origin:]
        return out


class PooledRegression(GlobalForecaster):
    """Ridge-stabilized linear regression on pooled feature rows.

    One coefficient vector is estimated over the stacked design rows of all
    series (cross-learning). The intercept, when present, is not penalized,
    so ``ridge_lambda=0`` reduces to exact least squares.
    """

    kind = "pooled_linear"

    def __init__(self, recipe: FeatureRecipe | None = None, ridge_lambda: float = 1e-6):
        self.recipe = recipe
        self.ridge_lambda = ridge_lambda

    def fit(self, panel: TimeSeriesPanel, up_to: int) -> "PooledRegression":
        recipe = self.recipe or FeatureRecipe.default(panel.frequency.season_length)
        if self.ridge_lambda < 0:
            raise FitError("ridge_lambda must be >= 0")
        encoders = build_categorical_encoders(panel, recipe)
        table = build_features(panel, recipe, up_to, encoders=encoders)
        names = recipe.feature_names()
        if len(table) == 0:
            raise FitError("empty design: no rows with fully defined features")
        X = table[names].to_numpy(dtype=float) if names else np.empty((len(table), 0))
        if recipe.intercept:
            X = np.column_stack([X, np.ones(len(X))])
        if X.shape[0] <= X.shape[1]:
            raise FitError(
                f"design has {X.shape[0]} rows for {X.shape[1]} columns; "
                f"more rows than features are required"
            )
        y = table["target"].to_numpy(dtype=float)
        if self.ridge_lambda == 0:
            coef, *_ = np.linalg.lstsq(X, y, rcond=None)
        else:
            penalty = np.full(X.shape[1], self.ridge_lambda)
            if recipe.intercept:
                penalty[-1] = 0.0
            gram = X.T @ X + np.diag(penalty)
            try:
                coef = np.linalg.solve(gram, X.T @ y)
            except np.linalg.LinAlgError as exc:
                raise FitError(f"degenerate design: {exc}") from None
        self.recipe_ = recipe
        self.encoders_ = encoders
        self.coef_ = coef
        self.fitted_at_origin_ = int(up_to)
        return self

    def _static_codes(self, panel: TimeSeriesPanel) -> np.ndarray | None:
        recipe = self.recipe_
        if not recipe.static_columns:
            return None
        codes = np.empty((panel.n_series, len(recipe.static_columns)))
        for i, sid in enumerate(panel.series_ids):
            for j, col in enumerate(recipe.static_columns):
                codes[i, j] = self.encoders_[col][panel.static_metadata[sid][col]]
        return codes

    def _external_row(self, panel: TimeSeriesPanel, t: int) -> np.ndarray | None:
        recipe = self.recipe_
        if not recipe.external_columns:
            return None
        row = np.empty((panel.n_series, len(recipe.external_columns)))
        for i, sid in enumerate(panel.series_ids):
            exog = panel.exogenous.get(sid)
            if exog is None or t >= len(exog):
                raise InputError(
                    f"series {sid!r} lacks exogenous values at target index {t}"
                )
            for j, col in enumerate(recipe.external_columns):
                if col in self.encoders_:
                    row[i, j] = self.encoders_[col][exog[col].iloc[t]]
                else:
                    row[i, j] = float(exog[col].iloc[t])
        return row

    def predict(
        self, panel: TimeSeriesPanel, origin: int, horizon: int
    ) -> dict[str, np.ndarray]:
        self._check_predictable(panel, origin, horizon)
        recipe = self.recipe_
        if origin < recipe.min_history:
            raise InputError(
                f"need at least {recipe.min_history} observations before origin, "
                f"got {origin}"
            )
        sids = panel.series_ids
        ext = np.empty((len(sids), origin + horizon))
        for i, sid in enumerate(sids):
            ext[i, :origin] = panel.values[sid][:origin]
        static_codes = self._static_codes(panel)
        for k in range(1, horizon + 1):
            t = origin + k - 1
            stamps = _target_timestamps(panel, t) if recipe.calendar else None
            X = lead_feature_matrix(
                recipe, ext, t, stamps, static_codes, self._external_row(panel, t)
            )
            if recipe.intercept:
                X = np.column_stack([X, np.ones(len(sids))])
            ext[:, t] = X @ self.coef_
        return {sid: ext[i, origin:].copy() for i, sid in enumerate(sids)}


def fit_pooled_linear(
    panel: TimeSeriesPanel,
    recipe: FeatureRecipe | None = None,
    up_to: int | None = None,
    ridge_lambda: float = 1e-6,
) -> PooledRegression:
    """Convenience wrapper: fit a :class:`PooledRegression` in one call."""
    if up_to is None:
        up_to = min(panel.length(sid) for sid in panel.series_ids)
    return PooledRegression(recipe=recipe, ridge_lambda=ridge_lambda).fit(panel, up_to)


BUILTIN_FORECASTERS = {
    SeasonalNaive.kind: SeasonalNaive,
    PooledRegression.kind: PooledRegression,
}
