"""Split-conformal quantile construction around point forecasts.

Calibration pools absolute residuals |y - yhat| per lead time over a
validation slice of forecasts, then reads interval half-widths off the
order statistics: for ``m`` residuals and central level ``c`` the width is
the ceil((m+1)*c)-th smallest residual, clamped to the largest when the
rank exceeds ``m``. Applying a calibration turns each point forecast into
a symmetric quantile track: level (1-c)/2 at point - width, (1+c)/2 at
point + width, and the median at the point itself. Widths are
non-decreasing in ``c`` by construction, so tracks never cross.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .errors import CalibrationError, ConfigurationError
from .matrix import ForecastMatrix
from .panel import TimeSeriesPanel

DEFAULT_CENTRAL_LEVELS = (0.6, 0.7, 0.8, 0.9, 0.95, 0.99)


def central_levels_to_quantiles(levels) -> tuple[float, ...]:
    """Quantile set implied by central interval levels: the median plus
    (1-c)/2 and (1+c)/2 for each level ``c``, sorted ascending."""
    quantiles = {0.5}
    for c in levels:
        if not 0.0 < c < 1.0:
            raise ConfigurationError(f"central level {c} outside (0, 1)")
        lo, hi = round((1 - c) / 2, 10), round((1 + c) / 2, 10)
        if lo in quantiles or hi in quantiles:
            raise ConfigurationError(f"central level {c} duplicates a quantile level")
        quantiles.update((lo, hi))
    return tuple(sorted(quantiles))


def _width_at(sorted_abs_residuals: np.ndarray, c: float) -> float:
    m = len(sorted_abs_residuals)
    rank = math.ceil((m + 1) * c - 1e-12)
    return float(sorted_abs_residuals[min(rank, m) - 1])


class ConformalCalibrator(BaseEstimator):
    """Learns per-lead interval half-widths from validation residuals.

    ``pool`` controls the residual pooling granularity: ``"all"`` (default)
    pools across series, ``"per_series"`` keeps one width table per series.
    """

    def __init__(self, central_levels=DEFAULT_CENTRAL_LEVELS, pool: str = "all"):
        self.central_levels = tuple(central_levels)
        self.pool = pool

    def fit(self, forecasts: ForecastMatrix, panel: TimeSeriesPanel) -> "ConformalCalibrator":
        if self.pool not in ("all", "per_series"):
            raise ConfigurationError(f"pool must be 'all' or 'per_series', got {self.pool!r}")
        levels = tuple(sorted(round(float(c), 10) for c in self.central_levels))
        if len(set(levels)) != len(levels):
            raise ConfigurationError("duplicate central levels")
        self.quantile_levels_ = central_levels_to_quantiles(levels)
        h = forecasts.horizon
        if len(forecasts) == 0:
            raise CalibrationError("no validation forecasts to calibrate on")

        residuals: dict[str, list[list[float]]] = {}
        for sid, origin in forecasts.keys():
            y = panel.values[sid]
            if origin + h > len(y):
                raise CalibrationError(
                    f"series {sid!r} origin {origin}: actuals missing for a full "
                    f"{h}-step validation window"
                )
            errs = np.abs(y[origin : origin + h] - forecasts.point(sid, origin))
            bucket = residuals.setdefault(sid, [[] for _ in range(h)])
            for k in range(h):
                bucket[k].append(float(errs[k]))

        def widths_from(buckets: list[list[float]]) -> tuple[np.ndarray, np.ndarray]:
            widths = np.empty((h, len(levels)))
            sizes = np.empty(h, dtype=int)
            for k in range(h):
                pool = np.sort(np.asarray(buckets[k]))
                if len(pool) == 0:
                    raise CalibrationError(f"no residuals at lead {k + 1}")
                sizes[k] = len(pool)
                for j, c in enumerate(levels):
                    widths[k, j] = _width_at(pool, c)
            return widths, sizes

        self.central_levels_ = levels
        self.horizon_ = h
        if self.pool == "all":
            merged = [sum((residuals[sid][k] for sid in residuals), []) for k in range(h)]
            self.widths_, self.calibration_size_ = widths_from(merged)
            self.widths_by_series_ = None
        else:
            self.widths_by_series_ = {}
            self.size_by_series_ = {}
            for sid in sorted(residuals):
                self.widths_by_series_[sid], self.size_by_series_[sid] = widths_from(
                    residuals[sid]
                )
            self.widths_ = None
            self.calibration_size_ = None
        return self

    def _widths_for(self, sid: str) -> np.ndarray:
        if self.pool == "all":
            return self.widths_
        try:
            return self.widths_by_series_[sid]
        except KeyError:
            raise CalibrationError(f"no per-series calibration for {sid!r}") from None

    def transform(self, points: ForecastMatrix) -> ForecastMatrix:
        """New matrix with the same points plus symmetric quantile tracks."""
        if getattr(self, "central_levels_", None) is None:
            raise CalibrationError("calibrator is not fitted")
        if points.horizon > self.horizon_:
            raise CalibrationError(
                f"calibration covers leads 1..{self.horizon_} but forecasts "
                f"extend to lead {points.horizon}"
            )
        h = points.horizon
        out = ForecastMatrix(h, quantile_levels=self.quantile_levels_)
        n_c = len(self.central_levels_)
        for sid, origin in points.keys():
            point = points.point(sid, origin)
            widths = self._widths_for(sid)[:h]
            tracks = np.empty((h, 2 * n_c + 1))
            # ascending level order: widest lower bound first
            for j, _ in enumerate(self.central_levels_):
                tracks[:, j] = point - widths[:, n_c - 1 - j]
            tracks[:, n_c] = point
            for j, _ in enumerate(self.central_levels_):
                tracks[:, n_c + 1 + j] = point + widths[:, j]
            out.set_point(sid, origin, point)
            out.set_quantiles(sid, origin, tracks)
        return out

    apply = transform

    def to_csv(self, path: str | Path) -> Path:
        """Audit dump: one row per (lead, level) with width and pool size."""
        if getattr(self, "central_levels_", None) is None:
            raise CalibrationError("calibrator is not fitted")
        path = Path(path)
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            if self.pool == "all":
                writer.writerow(["lead", "level", "width", "m"])
                for k in range(self.horizon_):
                    for j, c in enumerate(self.central_levels_):
                        writer.writerow(
                            [k + 1, c, repr(float(self.widths_[k, j])),
                             int(self.calibration_size_[k])]
                        )
            else:
                writer.writerow(["series_id", "lead", "level", "width", "m"])
                for sid, widths in self.widths_by_series_.items():
                    for k in range(self.horizon_):
                        for j, c in enumerate(self.central_levels_):
                            writer.writerow(
                                [sid, k + 1, c, repr(float(widths[k, j])),
                                 int(self.size_by_series_[sid][k])]
                            )
        return path


def calibrate(
    forecasts: ForecastMatrix,
    panel: TimeSeriesPanel,
    central_levels=DEFAULT_CENTRAL_LEVELS,
    pool: str = "all",
) -> ConformalCalibrator:
    return ConformalCalibrator(central_levels=central_levels, pool=pool).fit(
        forecasts, panel
    )
