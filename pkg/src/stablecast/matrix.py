"""Forecast storage keyed by (series, origin) plus the exchange CSV format.

A :class:`ForecastMatrix` holds, for one model, an ``h``-vector of point
forecasts per (series id, origin) block and optionally a quantile track per
block with one column per level. Blocks are independent, so ragged origin
coverage across series is representable, but each block is complete: all
``h`` leads, and all declared levels when quantiles are present.

The exchange format is long CSV with columns
``(model, series_id, origin_timestamp, lead, value[, q])``; point rows
leave ``q`` empty. Files written here round-trip through ingestion.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import (
    CompletenessError,
    InputError,
    MonotonicityError,
    SchemaError,
)
from .panel import TimeSeriesPanel


@dataclass(frozen=True)
class ForecastSchema:
    """Column-name mapping for forecast exchange CSV files."""

    model: str = "model"
    series_id: str = "series_id"
    origin: str = "origin_timestamp"
    lead: str = "lead"
    value: str = "value"
    quantile: str = "q"


class ForecastMatrix:
    """Point and per-quantile forecasts for one model."""

    def __init__(self, horizon: int, quantile_levels: tuple[float, ...] = ()):
        if horizon < 1:
            raise InputError("horizon must be >= 1")
        self.horizon = int(horizon)
        self.quantile_levels = tuple(float(q) for q in quantile_levels)
        self._points: dict[tuple[str, int], np.ndarray] = {}
        self._quantiles: dict[tuple[str, int], np.ndarray] = {}

    # -- write ----------------------------------------------------------

    def set_point(self, series_id: str, origin: int, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.horizon,):
            raise InputError(
                f"block ({series_id!r}, {origin}) has {values.shape} values, "
                f"expected ({self.horizon},)"
            )
        if not np.all(np.isfinite(values)):
            raise InputError(f"block ({series_id!r}, {origin}) has non-finite forecasts")
        self._points[(series_id, int(origin))] = values

    def set_quantiles(self, series_id: str, origin: int, tracks) -> None:
        if not self.quantile_levels:
            raise InputError("matrix declares no quantile levels")
        tracks = np.asarray(tracks, dtype=float)
        expected = (self.horizon, len(self.quantile_levels))
        if tracks.shape != expected:
            raise InputError(
                f"block ({series_id!r}, {origin}) quantile shape {tracks.shape}, "
                f"expected {expected}"
            )
        if np.any(np.diff(tracks, axis=1) < 0):
            raise MonotonicityError(
                f"block ({series_id!r}, {origin}) has crossing quantile tracks"
            )
        self._quantiles[(series_id, int(origin))] = tracks

    # -- read -----------------------------------------------------------

    def point(self, series_id: str, origin: int) -> np.ndarray:
        return self._points[(series_id, int(origin))]

    def quantiles(self, series_id: str, origin: int) -> np.ndarray:
        return self._quantiles[(series_id, int(origin))]

    def keys(self) -> list[tuple[str, int]]:
        return sorted(self._points)

    def series_ids(self) -> list[str]:
        return sorted({sid for sid, _ in self._points})

    def origins(self, series_id: str) -> list[int]:
        return sorted(origin for sid, origin in self._points if sid == series_id)

    @property
    def has_quantiles(self) -> bool:
        return bool(self._quantiles)

    def has_quantile_block(self, series_id: str, origin: int) -> bool:
        return (series_id, int(origin)) in self._quantiles

    @property
    def quantiles_complete(self) -> bool:
        """True when every point block also carries a quantile track."""
        return bool(self._points) and all(k in self._quantiles for k in self._points)

    def __len__(self) -> int:
        return len(self._points)

    def __contains__(self, key: tuple[str, int]) -> bool:
        return key in self._points

    def equals(self, other: "ForecastMatrix", atol: float = 0.0) -> bool:
        if self.horizon != other.horizon or self.keys() != other.keys():
            return False
        if self.quantile_levels != other.quantile_levels:
            return False
        for key in self.keys():
            if not np.allclose(self._points[key], other._points[key], rtol=0, atol=atol):
                return False
            mine, theirs = key in self._quantiles, key in other._quantiles
            if mine != theirs:
                return False
            if mine and not np.allclose(
                self._quantiles[key], other._quantiles[key], rtol=0, atol=atol
            ):
                return False
        return True


# -- exchange CSV ---------------------------------------------------------


def forecasts_to_frame(
    matrix: ForecastMatrix,
    model: str,
    panel: TimeSeriesPanel,
    schema: ForecastSchema | None = None,
) -> pd.DataFrame:
    """Long frame in the exchange layout; origin written as the timestamp
    of the last training observation."""
    schema = schema or ForecastSchema()
    rows: dict[str, list] = {
        schema.model: [],
        schema.series_id: [],
        schema.origin: [],
        schema.lead: [],
        schema.value: [],
        schema.quantile: [],
    }
    leads = list(range(1, matrix.horizon + 1))
    for sid, origin in matrix.keys():
        stamp = str(panel.timestamps[sid][origin - 1])
        points = matrix.point(sid, origin)
        for k in leads:
            rows[schema.model].append(model)
            rows[schema.series_id].append(sid)
            rows[schema.origin].append(stamp)
            rows[schema.lead].append(k)
            rows[schema.value].append(points[k - 1])
            rows[schema.quantile].append(np.nan)
        if matrix.has_quantile_block(sid, origin):
            tracks = matrix.quantiles(sid, origin)
            for j, q in enumerate(matrix.quantile_levels):
                for k in leads:
                    rows[schema.model].append(model)
                    rows[schema.series_id].append(sid)
                    rows[schema.origin].append(stamp)
                    rows[schema.lead].append(k)
                    rows[schema.value].append(tracks[k - 1, j])
                    rows[schema.quantile].append(q)
    return pd.DataFrame(rows)


def write_forecasts(
    matrices: dict[str, ForecastMatrix],
    panel: TimeSeriesPanel,
    path: str | Path,
    schema: ForecastSchema | None = None,
) -> Path:
    frames = [
        forecasts_to_frame(matrix, model, panel, schema)
        for model, matrix in sorted(matrices.items())
    ]
    pd.concat(frames, ignore_index=True).to_csv(path, index=False)
    return Path(path)


def _origins_as_indices(
    column: pd.Series, series_ids: pd.Series, panel: TimeSeriesPanel | None
) -> np.ndarray:
    """Map the origin column to integer origins (training-set sizes).

    Integer-valued columns are taken as indices directly; otherwise values
    are parsed as timestamps of the last training observation and located
    within each series, which requires the panel.
    """
    numeric = pd.to_numeric(column, errors="coerce")
    if numeric.notna().all() and (numeric == numeric.round()).all():
        return numeric.to_numpy(dtype=int)
    if panel is None:
        raise SchemaError(
            "origin column holds timestamps; a panel is required to map them"
        )
    try:
        stamps = pd.to_datetime(column, format="ISO8601").to_numpy().astype("datetime64[D]")
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"origin column is neither integer nor ISO-8601: {exc}") from None
    out = np.empty(len(column), dtype=int)
    for i, (sid, stamp) in enumerate(zip(series_ids, stamps)):
        out[i] = panel.index_at(str(sid), stamp) + 1
    return out


def read_forecast_file(
    path: str | Path,
    schema: ForecastSchema | None = None,
    panel: TimeSeriesPanel | None = None,
    on_crossing: str = "raise",
) -> dict[str, ForecastMatrix]:
    """Parse an exchange CSV into one validated matrix per model.

    Every (series, origin) block must carry all leads ``1..h`` (h is the
    largest lead the model declares anywhere), and blocks with quantile rows
    must cover every level the model uses. ``on_crossing`` selects whether
    crossing quantile tracks reject the file ("raise") or are re-sorted
    level-wise ("sort").
    """
    schema = schema or ForecastSchema()
    if on_crossing not in ("raise", "sort"):
        raise SchemaError(f"on_crossing must be 'raise' or 'sort', got {on_crossing!r}")
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"forecast file not found: {path}")
    df = pd.read_csv(
        path,
        dtype={schema.series_id: str, schema.model: str},
        float_precision="round_trip",
    )
    for col in (schema.model, schema.series_id, schema.origin, schema.lead, schema.value):
        if col not in df.columns:
            raise SchemaError(f"missing column {col!r}")
    has_q = schema.quantile in df.columns
    df["_origin"] = _origins_as_indices(df[schema.origin], df[schema.series_id], panel)
    df["_lead"] = pd.to_numeric(df[schema.lead], errors="raise").astype(int)
    df["_q"] = pd.to_numeric(df[schema.quantile], errors="raise") if has_q else np.nan

    out: dict[str, ForecastMatrix] = {}
    for model, chunk in df.groupby(schema.model, sort=True):
        h = int(chunk["_lead"].max())
        point_rows = chunk[chunk["_q"].isna()]
        quant_rows = chunk[chunk["_q"].notna()]
        levels = tuple(sorted(quant_rows["_q"].unique()))
        matrix = ForecastMatrix(h, quantile_levels=levels)

        for (sid, origin), block in point_rows.groupby(
            [schema.series_id, "_origin"], sort=True
        ):
            got = sorted(block["_lead"].tolist())
            if got != list(range(1, h + 1)):
                missing = sorted(set(range(1, h + 1)) - set(got))
                raise CompletenessError(
                    f"model {model!r} block ({sid!r}, origin {origin}) missing "
                    f"leads {missing}"
                )
            values = block.sort_values("_lead")[schema.value].to_numpy(dtype=float)
            matrix.set_point(str(sid), int(origin), values)

        for (sid, origin), block in quant_rows.groupby(
            [schema.series_id, "_origin"], sort=True
        ):
            key = (str(sid), int(origin))
            if key not in matrix:
                raise CompletenessError(
                    f"model {model!r} block ({sid!r}, origin {origin}) has quantile "
                    f"rows but no point rows"
                )
            tracks = np.full((h, len(levels)), np.nan)
            for _, row in block.iterrows():
                tracks[int(row["_lead"]) - 1, levels.index(float(row["_q"]))] = row[
                    schema.value
                ]
            if np.isnan(tracks).any():
                k, j = map(int, np.argwhere(np.isnan(tracks))[0])
                raise CompletenessError(
                    f"model {model!r} block ({sid!r}, origin {origin}) missing "
                    f"lead {k + 1} at level {levels[j]}"
                )
            if on_crossing == "sort":
                tracks = np.sort(tracks, axis=1)
            matrix.set_quantiles(str(sid), int(origin), tracks)
        out[str(model)] = matrix
    return out


def ingest_external_forecasts(
    path: str | Path,
    schema: ForecastSchema | None = None,
    panel: TimeSeriesPanel | None = None,
    model: str | None = None,
    on_crossing: str = "raise",
) -> ForecastMatrix:
    """Read one model's forecasts from an exchange CSV.

    When the file holds several models, ``model`` selects which one.
    """
    matrices = read_forecast_file(path, schema=schema, panel=panel, on_crossing=on_crossing)
    if model is not None:
        if model not in matrices:
            raise SchemaError(f"model {model!r} not present in {path}")
        return matrices[model]
    if len(matrices) != 1:
        raise SchemaError(
            f"file holds models {sorted(matrices)}; pass model= to choose one"
        )
    return next(iter(matrices.values()))
