"""Multi-series panel data model, CSV ingestion, validation, filtering.

A panel is a collection of aligned univariate series sharing one sampling
frequency, optionally carrying exogenous feature columns and static
(per-series) categorical metadata. Input and output format is long/tidy
CSV with one row per (series, timestamp) observation.

Time is handled in two layers: timestamps live on the panel for I/O and
calendar features, while all evaluation arithmetic uses integer positions.
An "origin" ``n`` always means the number of observations available to the
model, so the forecast for lead ``k`` targets array index ``n + k - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import EmptyPanelError, PanelValidationError, SchemaError

_FREQUENCY_SEASONS = {"daily": 7, "weekly": 52}
_FREQUENCY_STEPS = {"daily": np.timedelta64(1, "D"), "weekly": np.timedelta64(7, "D")}


@dataclass(frozen=True)
class FrequencyProfile:
    """Sampling frequency with its seasonal period.

    ``daily`` implies a season length of 7 and ``weekly`` 52; ``custom``
    accepts any season length but skips the calendar-contiguity check.
    """

    label: str
    season_length: int
    periods_per_year: int

    def __post_init__(self):
        if self.label not in ("daily", "weekly", "custom"):
            raise PanelValidationError(f"unknown frequency label {self.label!r}")
        if self.season_length < 1 or self.periods_per_year < 1:
            raise PanelValidationError("season_length and periods_per_year must be >= 1")
        expected = _FREQUENCY_SEASONS.get(self.label)
        if expected is not None and self.season_length != expected:
            raise PanelValidationError(
                f"{self.label} frequency requires season_length {expected}, "
                f"got {self.season_length}"
            )

    @classmethod
    def daily(cls) -> "FrequencyProfile":
        return cls("daily", 7, 365)

    @classmethod
    def weekly(cls) -> "FrequencyProfile":
        return cls("weekly", 52, 52)

    @property
    def period_step(self) -> np.timedelta64 | None:
        """Calendar distance between consecutive observations, if fixed."""
        return _FREQUENCY_STEPS.get(self.label)


@dataclass(frozen=True)
class PanelSchema:
    """Column-name mapping for long-format panel CSV files."""

    series_id: str = "series_id"
    timestamp: str = "timestamp"
    value: str = "value"
    exogenous: tuple[str, ...] = ()
    static: tuple[str, ...] = ()

    @property
    def required(self) -> tuple[str, ...]:
        return (self.series_id, self.timestamp, self.value)


@dataclass(frozen=True)
class PanelSummary:
    n_series: int
    min_length: int
    max_length: int
    frequency: str


@dataclass(frozen=True)
class TimeSeriesPanel:
    """Immutable collection of aligned series plus optional side data.

    ``values`` maps series id to a float64 array ordered by timestamp;
    ``timestamps`` holds the matching ``datetime64[D]`` arrays. Exogenous
    frames, when present, are row-aligned with the target series. Instances
    are safe to share across workers; arrays are marked read-only.
    """

    frequency: FrequencyProfile
    values: dict[str, np.ndarray]
    timestamps: dict[str, np.ndarray]
    exogenous: dict[str, pd.DataFrame] = field(default_factory=dict)
    static_metadata: dict[str, dict[str, object]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.values:
            raise EmptyPanelError("panel has zero series")
        step = self.frequency.period_step
        for sid, vals in self.values.items():
            if not sid:
                raise PanelValidationError("series id must be non-empty")
            vals = np.asarray(vals, dtype=float)
            ts = np.asarray(self.timestamps[sid], dtype="datetime64[D]")
            if vals.shape != ts.shape or vals.ndim != 1:
                raise PanelValidationError(f"series {sid!r}: values/timestamps misaligned")
            if not np.all(np.isfinite(vals)):
                pos = int(np.flatnonzero(~np.isfinite(vals))[0])
                raise PanelValidationError(f"series {sid!r}: non-finite value at position {pos}")
            diffs = np.diff(ts)
            if np.any(diffs <= np.timedelta64(0, "D")):
                pos = int(np.flatnonzero(diffs <= np.timedelta64(0, "D"))[0])
                if diffs[pos] == np.timedelta64(0, "D"):
                    raise PanelValidationError(
                        f"series {sid!r}: duplicate timestamp {ts[pos + 1]}"
                    )
                raise PanelValidationError(f"series {sid!r}: timestamps not sorted")
            if step is not None and np.any(diffs != step):
                pos = int(np.flatnonzero(diffs != step)[0])
                raise PanelValidationError(
                    f"series {sid!r}: gap after {ts[pos]}; interior timestamps "
                    f"must be contiguous at {self.frequency.label} frequency"
                )
            exog = self.exogenous.get(sid)
            if exog is not None and len(exog) != len(vals):
                raise PanelValidationError(
                    f"series {sid!r}: exogenous rows ({len(exog)}) != observations ({len(vals)})"
                )
            vals.setflags(write=False)
            ts.setflags(write=False)
            self.values[sid] = vals
            self.timestamps[sid] = ts

    @property
    def series_ids(self) -> tuple[str, ...]:
        return tuple(self.values)

    @property
    def n_series(self) -> int:
        return len(self.values)

    def length(self, series_id: str) -> int:
        return len(self.values[series_id])

    @property
    def is_rectangular(self) -> bool:
        lengths = {len(v) for v in self.values.values()}
        return len(lengths) == 1

    def common_length(self) -> int:
        """Shared series length; raises unless the panel is rectangular."""
        lengths = {len(v) for v in self.values.values()}
        if len(lengths) != 1:
            raise PanelValidationError(
                f"operation requires equal-length series, found lengths {sorted(lengths)}"
            )
        return lengths.pop()

    def index_at(self, series_id: str, timestamp: np.datetime64) -> int:
        """Position of ``timestamp`` within a series (for origin mapping)."""
        ts = self.timestamps[series_id]
        pos = int(np.searchsorted(ts, timestamp))
        if pos >= len(ts) or ts[pos] != timestamp:
            raise PanelValidationError(
                f"series {series_id!r} has no observation at {timestamp}"
            )
        return pos


def load_panel(
    path: str | Path,
    schema: PanelSchema | None = None,
    frequency: FrequencyProfile | None = None,
) -> TimeSeriesPanel:
    """Read a long-format CSV into a validated panel.

    Rows are grouped by series id (order of first appearance) and sorted by
    timestamp within each series. Declared exogenous columns are attached
    row-aligned; declared static columns must be constant per series.
    """
    schema = schema or PanelSchema()
    frequency = frequency or FrequencyProfile.daily()
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"panel file not found: {path}")
    # round_trip parsing keeps re-serialized panels value-exact
    df = pd.read_csv(path, dtype={schema.series_id: str}, float_precision="round_trip")
    return panel_from_frame(df, schema, frequency)


def panel_from_frame(
    df: pd.DataFrame, schema: PanelSchema, frequency: FrequencyProfile
) -> TimeSeriesPanel:
    for col in schema.required + schema.exogenous + schema.static:
        if col not in df.columns:
            raise SchemaError(f"missing column {col!r}")
    try:
        parsed_ts = pd.to_datetime(df[schema.timestamp], format="ISO8601")
    except (ValueError, TypeError) as exc:
        raise SchemaError(f"column {schema.timestamp!r} is not ISO-8601: {exc}") from None

    raw_values = pd.to_numeric(df[schema.value], errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(raw_values)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise PanelValidationError(
            f"non-finite value in column {schema.value!r} at row {row}"
        )

    work = df.copy()
    work["_ts"] = parsed_ts.to_numpy().astype("datetime64[D]")
    work["_y"] = raw_values

    values: dict[str, np.ndarray] = {}
    timestamps: dict[str, np.ndarray] = {}
    exogenous: dict[str, pd.DataFrame] = {}
    static_metadata: dict[str, dict[str, object]] = {}

    for sid, group in work.groupby(str(schema.series_id), sort=False):
        sid = str(sid)
        group = group.sort_values("_ts", kind="stable")
        ts = group["_ts"].to_numpy()
        dup = pd.Index(ts).duplicated()
        if dup.any():
            first = ts[int(np.flatnonzero(dup)[0])]
            raise PanelValidationError(f"series {sid!r}: duplicate timestamp {first}")
        values[sid] = group["_y"].to_numpy()
        timestamps[sid] = ts
        if schema.exogenous:
            exogenous[sid] = group[list(schema.exogenous)].reset_index(drop=True)
        if schema.static:
            meta: dict[str, object] = {}
            for col in schema.static:
                uniq = group[col].unique()
                if len(uniq) != 1:
                    raise PanelValidationError(
                        f"series {sid!r}: static column {col!r} is not constant"
                    )
                meta[col] = uniq[0]
            static_metadata[sid] = meta

    return TimeSeriesPanel(
        frequency=frequency,
        values=values,
        timestamps=timestamps,
        exogenous=exogenous,
        static_metadata=static_metadata,
    )


def save_panel(
    panel: TimeSeriesPanel, path: str | Path, schema: PanelSchema | None = None
) -> Path:
    """Write a panel back to long CSV using the same schema (round-trips)."""
    schema = schema or PanelSchema()
    path = Path(path)
    frames = []
    for sid in panel.series_ids:
        frame = pd.DataFrame(
            {
                schema.series_id: sid,
                schema.timestamp: [str(t) for t in panel.timestamps[sid]],
                # str() of a float round-trips exactly under Python 3
                schema.value: [str(v) for v in panel.values[sid]],
            }
        )
        exog = panel.exogenous.get(sid)
        if exog is not None:
            for col in exog.columns:
                frame[col] = exog[col].to_numpy()
        for col, val in panel.static_metadata.get(sid, {}).items():
            frame[col] = val
        frames.append(frame)
    pd.concat(frames, ignore_index=True).to_csv(path, index=False)
    return path


def filter_min_length(panel: TimeSeriesPanel, min_obs: int) -> TimeSeriesPanel:
    """Keep only series with at least ``min_obs`` observations.

    Order and contents of the retained series are unchanged; raises
    :class:`EmptyPanelError` when nothing survives.
    """
    if min_obs < 1:
        raise PanelValidationError(f"min_obs must be >= 1, got {min_obs}")
    keep = [sid for sid in panel.series_ids if panel.length(sid) >= min_obs]
    if not keep:
        raise EmptyPanelError(f"no series with at least {min_obs} observations")
    return replace(
        panel,
        values={sid: panel.values[sid] for sid in keep},
        timestamps={sid: panel.timestamps[sid] for sid in keep},
        exogenous={sid: panel.exogenous[sid] for sid in keep if sid in panel.exogenous},
        static_metadata={
            sid: panel.static_metadata[sid] for sid in keep if sid in panel.static_metadata
        },
    )


def summarize(panel: TimeSeriesPanel) -> PanelSummary:
    lengths = [panel.length(sid) for sid in panel.series_ids]
    return PanelSummary(
        n_series=panel.n_series,
        min_length=min(lengths),
        max_length=max(lengths),
        frequency=panel.frequency.label,
    )
