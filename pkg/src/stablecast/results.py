"""Metric result rows, baseline normalization, and table emission.

A :class:`MetricTable` collects values scoped by (model, metric,
retraining window r, optional series id, optional quantile level).
Normalization divides each aggregate row by the same row at the baseline
retraining window, so baseline rows become exactly 1.0. Per-series detail
rows are kept for rank tests but are not normalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import InputError, NormalizationError
from .metrics import METRIC_NAMES, SMAPC

_COLUMNS = ["model", "metric", "r", "series_id", "q", "value", "normalized_value"]


@dataclass(frozen=True)
class MetricValue:
    name: str
    value: float
    model: str
    r: int
    series_id: str | None = None
    q: float | None = None

    def __post_init__(self):
        if self.name not in METRIC_NAMES:
            raise InputError(f"unknown metric {self.name!r}")
        if not math.isfinite(self.value) or self.value < 0:
            raise InputError(f"{self.name} value must be finite and >= 0, got {self.value}")
        if self.name == SMAPC and self.value > 200.0 + 1e-9:
            raise InputError(f"sMAPC value {self.value} exceeds its 200 upper bound")


class MetricTable:
    def __init__(self, baseline_r: int):
        self.baseline_r = int(baseline_r)
        self._rows: list[MetricValue] = []
        self._normalized: dict[int, float] = {}
        self.normalization_skips: list[str] = []

    def add(
        self,
        name: str,
        value: float,
        model: str,
        r: int,
        series_id: str | None = None,
        q: float | None = None,
    ) -> None:
        self._rows.append(MetricValue(name, float(value), model, int(r), series_id, q))

    @property
    def rows(self) -> tuple[MetricValue, ...]:
        return tuple(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def models(self) -> list[str]:
        return sorted({row.model for row in self._rows})

    def metrics(self) -> list[str]:
        return sorted({row.name for row in self._rows})

    def scenarios(self) -> list[int]:
        return sorted({row.r for row in self._rows})

    def value(
        self,
        model: str,
        metric: str,
        r: int,
        series_id: str | None = None,
        q: float | None = None,
    ) -> float:
        for row in self._rows:
            if (
                row.model == model
                and row.name == metric
                and row.r == r
                and row.series_id == series_id
                and row.q == q
            ):
                return row.value
        raise InputError(
            f"no row for model={model!r} metric={metric!r} r={r} "
            f"series_id={series_id!r} q={q!r}"
        )

    def has_value(
        self,
        model: str,
        metric: str,
        r: int,
        series_id: str | None = None,
        q: float | None = None,
    ) -> bool:
        try:
            self.value(model, metric, r, series_id, q)
        except InputError:
            return False
        return True

    def aggregate_frame(self) -> pd.DataFrame:
        """Aggregate rows only (no per-series detail), one row per scope."""
        frame = self.to_frame()
        return frame[frame["series_id"].isna()].reset_index(drop=True)

    def normalize_to_baseline(self, on_zero_baseline: str = "raise") -> "MetricTable":
        """Fill ``normalized_value`` on every aggregate row.

        Each (model, metric, q) value at window r is divided by the value at
        the baseline window; missing baselines raise. A zero baseline raises
        by default; with ``on_zero_baseline="skip"`` the affected (model,
        metric) rows are left unnormalized and recorded in
        ``normalization_skips`` instead.
        """
        if on_zero_baseline not in ("raise", "skip"):
            raise InputError(f"on_zero_baseline must be 'raise' or 'skip'")
        baselines: dict[tuple, float] = {}
        for row in self._rows:
            if row.series_id is None and row.r == self.baseline_r:
                baselines[(row.model, row.name, row.q)] = row.value
        out = MetricTable(self.baseline_r)
        out._rows = list(self._rows)
        for idx, row in enumerate(out._rows):
            if row.series_id is not None:
                continue
            key = (row.model, row.name, row.q)
            if key not in baselines:
                raise NormalizationError(
                    f"no baseline (r={self.baseline_r}) row for model={row.model!r} "
                    f"metric={row.name!r} q={row.q!r}"
                )
            base = baselines[key]
            if base == 0.0:
                if on_zero_baseline == "raise":
                    raise NormalizationError(
                        f"zero baseline for model={row.model!r} metric={row.name!r}"
                    )
                note = f"model={row.model!r} metric={row.name!r}: zero baseline, not normalized"
                if note not in out.normalization_skips:
                    out.normalization_skips.append(note)
                continue
            out._normalized[idx] = row.value / base
        return out

    # -- serialization ----------------------------------------------------

    def to_frame(self) -> pd.DataFrame:
        records = []
        for idx, row in enumerate(self._rows):
            records.append(
                {
                    "model": row.model,
                    "metric": row.name,
                    "r": row.r,
                    "series_id": row.series_id,
                    "q": row.q,
                    "value": row.value,
                    "normalized_value": self._normalized.get(idx, np.nan),
                }
            )
        return pd.DataFrame(records, columns=_COLUMNS)

    def to_csv(self, path: str | Path) -> Path:
        self.to_frame().to_csv(path, index=False)
        return Path(path)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, baseline_r: int) -> "MetricTable":
        table = cls(baseline_r)
        for _, rec in frame.iterrows():
            sid = rec.get("series_id")
            q = rec.get("q")
            table.add(
                rec["metric"],
                float(rec["value"]),
                str(rec["model"]),
                int(rec["r"]),
                None if pd.isna(sid) else str(sid),
                None if pd.isna(q) else float(q),
            )
            if "normalized_value" in frame.columns and not pd.isna(
                rec["normalized_value"]
            ):
                table._normalized[len(table._rows) - 1] = float(rec["normalized_value"])
        return table

    @classmethod
    def read_csv(cls, path: str | Path, baseline_r: int) -> "MetricTable":
        return cls.from_frame(pd.read_csv(path), baseline_r)


def round_half_even(value: float, decimals: int) -> float:
    """Decimal half-even rounding on the shortest repr (0.0745 -> 0.074)."""
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_EVEN))


def wide_table(
    table: MetricTable, metric: str, normalized: bool = False, decimals: int = 3
) -> pd.DataFrame:
    """Methods-by-scenario layout: one row per model, one column per r."""
    frame = table.to_frame()
    rows = frame[
        (frame["metric"] == metric) & frame["series_id"].isna() & frame["q"].isna()
    ]
    if rows.empty:
        raise InputError(f"no aggregate rows for metric {metric!r}")
    column = "normalized_value" if normalized else "value"
    if normalized and rows[column].isna().all():
        raise NormalizationError("table has not been normalized")
    pivot = rows.pivot(index="model", columns="r", values=column).sort_index()
    pivot = pivot[sorted(pivot.columns)]
    if decimals is not None:
        pivot = pivot.map(lambda v: round_half_even(v, decimals) if pd.notna(v) else v)
    pivot.columns = [str(c) for c in pivot.columns]
    return pivot.reset_index()


def emit_table(
    table: MetricTable,
    path: str | Path,
    layout: str = "methods-by-scenario",
    metric: str | None = None,
    normalized: bool = False,
    decimals: int = 3,
) -> Path:
    """Write a result table; layout is ``"long"`` or ``"methods-by-scenario"``."""
    path = Path(path)
    if layout == "long":
        table.to_csv(path)
    elif layout == "methods-by-scenario":
        if metric is None:
            raise InputError("methods-by-scenario layout requires a metric")
        wide_table(table, metric, normalized=normalized, decimals=decimals).to_csv(
            path, index=False
        )
    else:
        raise InputError(f"unknown layout {layout!r}")
    return path
