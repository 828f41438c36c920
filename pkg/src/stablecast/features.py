"""Lag / rolling / expanding / calendar feature construction.

All history-based features at target index ``t`` use values strictly before
``t``: lag ``L`` reads position ``t - L``, a rolling mean of window ``w``
averages positions ``t - w .. t - 1``, the expanding mean averages
``0 .. t - 1``. This keeps the design table leak-free and lets the same
definitions serve recursive multi-step prediction, where forecasts fill in
for future values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import ConfigurationError, SchemaError
from .panel import TimeSeriesPanel

CALENDAR_FEATURES = ("year", "month", "week", "day_of_week")


@dataclass(frozen=True)
class FeatureRecipe:
    lags: tuple[int, ...] = ()
    rolling_mean_windows: tuple[int, ...] = ()
    expanding_mean: bool = False
    calendar: tuple[str, ...] = ()
    static_columns: tuple[str, ...] = ()
    external_columns: tuple[str, ...] = ()
    intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lags", tuple(self.lags))
        object.__setattr__(self, "rolling_mean_windows", tuple(self.rolling_mean_windows))
        object.__setattr__(self, "calendar", tuple(self.calendar))
        object.__setattr__(self, "static_columns", tuple(self.static_columns))
        object.__setattr__(self, "external_columns", tuple(self.external_columns))
        if any(lag < 1 for lag in self.lags):
            raise ConfigurationError("lag offsets must be >= 1")
        if any(w < 1 for w in self.rolling_mean_windows):
            raise ConfigurationError("rolling windows must be >= 1")
        unknown = set(self.calendar) - set(CALENDAR_FEATURES)
        if unknown:
            raise ConfigurationError(f"unknown calendar features {sorted(unknown)}")

    @classmethod
    def default(cls, season_length: int) -> "FeatureRecipe":
        """Lags over one season, rolling means over one and two seasons."""
        return cls(
            lags=tuple(range(1, season_length + 1)),
            rolling_mean_windows=(season_length, 2 * season_length),
            expanding_mean=True,
            calendar=CALENDAR_FEATURES,
        )

    @property
    def min_history(self) -> int:
        """Observations needed before the first fully defined row."""
        needs = [0]
        needs.extend(self.lags)
        needs.extend(self.rolling_mean_windows)
        if self.expanding_mean:
            needs.append(1)
        return max(needs)

    def feature_names(self) -> list[str]:
        names = [f"lag_{k}" for k in self.lags]
        names += [f"rolling_mean_{w}" for w in self.rolling_mean_windows]
        if self.expanding_mean:
            names.append("expanding_mean")
        names += list(self.calendar)
        names += list(self.static_columns)
        names += list(self.external_columns)
        return names


def lagged(values: np.ndarray, k: int) -> np.ndarray:
    out = np.full(len(values), np.nan)
    out[k:] = values[:-k]
    return out


def rolling_mean_excl(values: np.ndarray, w: int) -> np.ndarray:
    """Mean of the ``w`` values before each position (current excluded)."""
    n = len(values)
    out = np.full(n, np.nan)
    if w >= n + 1:
        return out
    csum = np.concatenate(([0.0], np.cumsum(values)))
    t = np.arange(w, n)
    out[w:] = (csum[t] - csum[t - w]) / w
    return out


def expanding_mean_excl(values: np.ndarray) -> np.ndarray:
    out = np.full(len(values), np.nan)
    csum = np.cumsum(values)
    t = np.arange(1, len(values))
    out[1:] = csum[:-1] / t
    return out


def calendar_frame(timestamps: np.ndarray, which: tuple[str, ...]) -> pd.DataFrame:
    idx = pd.DatetimeIndex(timestamps)
    cols = {}
    iso = idx.isocalendar()
    for name in which:
        if name == "year":
            cols[name] = idx.year.to_numpy(dtype=float)
        elif name == "month":
            cols[name] = idx.month.to_numpy(dtype=float)
        elif name == "week":
            cols[name] = iso.week.to_numpy(dtype=float)
        elif name == "day_of_week":
            cols[name] = idx.dayofweek.to_numpy(dtype=float)
    return pd.DataFrame(cols)


def build_categorical_encoders(
    panel: TimeSeriesPanel, recipe: FeatureRecipe
) -> dict[str, dict[object, int]]:
    """Deterministic integer codes (sorted unique values) per categorical column."""
    encoders: dict[str, dict[object, int]] = {}
    for col in recipe.static_columns:
        seen = set()
        for sid in panel.series_ids:
            meta = panel.static_metadata.get(sid)
            if meta is None or col not in meta:
                raise SchemaError(f"static column {col!r} absent for series {sid!r}")
            seen.add(meta[col])
        encoders[col] = {v: i for i, v in enumerate(sorted(seen, key=str))}
    for col in recipe.external_columns:
        non_numeric = set()
        for sid in panel.series_ids:
            exog = panel.exogenous.get(sid)
            if exog is None or col not in exog.columns:
                raise SchemaError(f"exogenous column {col!r} absent for series {sid!r}")
            if not pd.api.types.is_numeric_dtype(exog[col]):
                non_numeric.update(exog[col].unique())
        if non_numeric:
            encoders[col] = {v: i for i, v in enumerate(sorted(non_numeric, key=str))}
    return encoders


def _encode_external(panel, sid, col, encoders) -> np.ndarray:
    column = panel.exogenous[sid][col]
    if col in encoders:
        return column.map(encoders[col]).to_numpy(dtype=float)
    return column.to_numpy(dtype=float)


def build_features(
    panel: TimeSeriesPanel,
    recipe: FeatureRecipe,
    up_to: int,
    encoders: dict[str, dict[object, int]] | None = None,
) -> pd.DataFrame:
    """Design table over all series for targets at indices ``0 .. up_to-1``.

    Returns one row per (series, target index) with the target value and
    every recipe feature, rows with undefined history features dropped.
    Column order is fixed by :meth:`FeatureRecipe.feature_names`.
    """
    if encoders is None:
        encoders = build_categorical_encoders(panel, recipe)
    names = recipe.feature_names()
    frames = []
    for sid in panel.series_ids:
        y = panel.values[sid]
        n = min(up_to, len(y))
        if n <= 0:
            continue
        cols: dict[str, np.ndarray] = {}
        for k in recipe.lags:
            cols[f"lag_{k}"] = lagged(y, k)[:n]
        for w in recipe.rolling_mean_windows:
            cols[f"rolling_mean_{w}"] = rolling_mean_excl(y, w)[:n]
        if recipe.expanding_mean:
            cols["expanding_mean"] = expanding_mean_excl(y)[:n]
        if recipe.calendar:
            cal = calendar_frame(panel.timestamps[sid][:n], recipe.calendar)
            for name in recipe.calendar:
                cols[name] = cal[name].to_numpy()
        for col in recipe.static_columns:
            meta = panel.static_metadata.get(sid)
            if meta is None or col not in meta:
                raise SchemaError(f"static column {col!r} absent for series {sid!r}")
            cols[col] = np.full(n, float(encoders[col][meta[col]]))
        for col in recipe.external_columns:
            if sid not in panel.exogenous or col not in panel.exogenous[sid].columns:
                raise SchemaError(f"exogenous column {col!r} absent for series {sid!r}")
            cols[col] = _encode_external(panel, sid, col, encoders)[:n]
        frame = pd.DataFrame({"series_id": sid, "t": np.arange(n), "target": y[:n]})
        for name in names:
            frame[name] = cols[name]
        frames.append(frame)
    table = pd.concat(frames, ignore_index=True)
    if names:
        table = table.dropna(subset=names).reset_index(drop=True)
    return table


def lead_feature_matrix(
    recipe: FeatureRecipe,
    extended: np.ndarray,
    t: int,
    timestamps: np.ndarray | None,
    static_codes: np.ndarray | None,
    external_row: np.ndarray | None,
) -> np.ndarray:
    """Feature block for one target index across all series at predict time.

    ``extended`` is (n_series, >= t) with observed values and earlier-lead
    forecasts filled through column ``t - 1``; ``timestamps`` holds each
    series' timestamp of the target period.
    """
    n_series = extended.shape[0]
    blocks = []
    for k in recipe.lags:
        blocks.append(extended[:, t - k])
    for w in recipe.rolling_mean_windows:
        blocks.append(extended[:, t - w : t].mean(axis=1))
    if recipe.expanding_mean:
        blocks.append(extended[:, :t].mean(axis=1))
    if recipe.calendar:
        cal = calendar_frame(timestamps, recipe.calendar)
        for name in recipe.calendar:
            blocks.append(cal[name].to_numpy())
    if recipe.static_columns:
        for j in range(static_codes.shape[1]):
            blocks.append(static_codes[:, j])
    if recipe.external_columns:
        for j in range(external_row.shape[1]):
            blocks.append(external_row[:, j])
    if not blocks:
        return np.empty((n_series, 0))
    return np.column_stack(blocks)
