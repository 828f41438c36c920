"""Accuracy and vertical-stability metrics.

Accuracy against actuals:

* ``rmsse``  -- root mean squared error scaled by the in-sample seasonal
  naive squared error; lower is better.
* ``quantile_loss`` / ``multi_quantile_loss`` -- pinball loss at one level,
  and its mean over a level set.

Stability between forecasts issued from two consecutive origins for the
same target periods (no actuals involved):

* ``smapc`` -- symmetric mean absolute percentage change, in [0, 200];
  0 means the overlapping forecasts are identical.
* ``quantile_change`` / ``multi_quantile_change`` -- pinball form with the
  earlier origin's forecast standing in for the actual, and its mean over
  a level set.

All functions are pure and operate on aligned 1-D vectors: stability
inputs are the two origins' forecasts for the shared target periods
(``h - 1`` points when the origins are one step apart).
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .errors import AggregationError, InputError, MetricUndefinedError

RMSSE = "RMSSE"
QL = "QL"
MQL = "MQL"
SMAPC = "sMAPC"
QC = "QC"
MQC = "MQC"

ACCURACY_METRICS = (RMSSE, QL, MQL)
STABILITY_METRICS = (SMAPC, QC, MQC)
METRIC_NAMES = ACCURACY_METRICS + STABILITY_METRICS


def _vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def _pair(a, b, names: tuple[str, str]) -> tuple[np.ndarray, np.ndarray]:
    va, vb = _vector(a, names[0]), _vector(b, names[1])
    if va.shape != vb.shape:
        raise InputError(f"{names[0]} and {names[1]} differ in length: "
                         f"{len(va)} vs {len(vb)}")
    if len(va) == 0:
        raise InputError(f"{names[0]} is empty")
    return va, vb


def rmsse(actuals, forecasts, training, season_length: int) -> float:
    """sqrt of mean squared forecast error over the horizon, divided by the
    mean squared one-season-back naive error over the training span."""
    y, f = _pair(actuals, forecasts, ("actuals", "forecasts"))
    train = _vector(training, "training")
    s = int(season_length)
    if s < 1:
        raise InputError("season_length must be >= 1")
    n = len(train)
    if n <= s:
        raise InputError(f"training length {n} must exceed season_length {s}")
    denom = float(np.mean((train[s:] - train[:-s]) ** 2))
    if denom == 0.0:
        raise MetricUndefinedError(
            f"seasonal-naive training error is zero (series is {s}-periodic)"
        )
    num = float(np.mean((y - f) ** 2))
    return float(np.sqrt(num / denom))


def _pinball(diff: np.ndarray, q: float) -> np.ndarray:
    # diff >= 0: under-forecast side weighted q; diff < 0: over side 1-q
    return np.where(diff >= 0, q * diff, (q - 1) * diff)


def quantile_loss(actuals, forecasts_q, q: float) -> float:
    """Pinball loss at level ``q``, averaged over the horizon."""
    if not 0.0 < q < 1.0:
        raise InputError(f"quantile level {q} outside (0, 1)")
    y, f = _pair(actuals, forecasts_q, ("actuals", "forecasts_q"))
    return float(np.mean(_pinball(y - f, q)))


def multi_quantile_loss(actuals, quantile_tracks, levels: Iterable[float]) -> float:
    """Mean of ``quantile_loss`` over a level set; tracks are (h, n_levels)."""
    levels = tuple(levels)
    if not levels:
        raise InputError("empty quantile level set")
    tracks = np.asarray(quantile_tracks, dtype=float)
    if tracks.ndim != 2 or tracks.shape[1] != len(levels):
        raise InputError(
            f"quantile_tracks shape {tracks.shape} does not match "
            f"{len(levels)} levels"
        )
    return float(
        np.mean([quantile_loss(actuals, tracks[:, j], q) for j, q in enumerate(levels)])
    )


def smapc(curr, prev, h: int | None = None, denominator: str = "sum") -> float:
    """Symmetric mean absolute percentage change between two origins.

    ``curr`` and ``prev`` are the forecasts of the later and earlier origin
    for the same target periods. A term with both forecasts zero counts as
    0 (perfectly stable). ``denominator`` selects ``|curr| + |prev|``
    (default, bounded in [0, 200]) or ``|curr| - |prev|``; the difference
    form can divide by zero and go negative and exists only for
    cross-checking against implementations that define it that way.
    """
    if denominator not in ("sum", "difference"):
        raise InputError(f"denominator must be 'sum' or 'difference', got {denominator!r}")
    c, p = _pair(curr, prev, ("curr", "prev"))
    m = len(c)
    if h is not None:
        if h < 2:
            raise InputError("smapc needs h >= 2 (no overlapping targets otherwise)")
        if m != h - 1:
            raise InputError(f"expected h-1 = {h - 1} overlap points, got {m}")
    num = np.abs(c - p)
    den = np.abs(c) + np.abs(p) if denominator == "sum" else np.abs(c) - np.abs(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(num == 0, 0.0, num / den)
    value = float(200.0 / m * np.sum(terms))
    if denominator == "sum":
        # each term is <= 1 exactly; only rounding in the normalizer can
        # push the total a few ulp past the bound
        value = min(value, 200.0)
    return value


def quantile_change(curr_q, prev_q, q: float, h: int | None = None) -> float:
    """Pinball-form change at level ``q`` between two origins' forecasts,
    with the earlier origin's forecast in place of the actual."""
    if not 0.0 < q < 1.0:
        raise InputError(f"quantile level {q} outside (0, 1)")
    c, p = _pair(curr_q, prev_q, ("curr_q", "prev_q"))
    if h is not None:
        if h < 2:
            raise InputError("quantile_change needs h >= 2")
        if len(c) != h - 1:
            raise InputError(f"expected h-1 = {h - 1} overlap points, got {len(c)}")
    return float(np.mean(_pinball(p - c, q)))


def multi_quantile_change(
    curr_tracks, prev_tracks, levels: Iterable[float], h: int | None = None
) -> float:
    """Mean of ``quantile_change`` over a level set; tracks are
    (overlap, n_levels) for each origin."""
    levels = tuple(levels)
    if not levels:
        raise InputError("empty quantile level set")
    c = np.asarray(curr_tracks, dtype=float)
    p = np.asarray(prev_tracks, dtype=float)
    if c.ndim != 2 or c.shape != p.shape or c.shape[1] != len(levels):
        raise InputError(
            f"track shapes {c.shape} / {p.shape} do not match {len(levels)} levels"
        )
    return float(
        np.mean(
            [quantile_change(c[:, j], p[:, j], q, h=h) for j, q in enumerate(levels)]
        )
    )


def aggregate_by_series(values_by_series: Mapping[str, Iterable[float]]) -> dict[str, float]:
    """Unweighted mean per series over its origin (or origin-pair) values."""
    if not values_by_series:
        raise AggregationError("no series to aggregate")
    out = {}
    for sid, values in values_by_series.items():
        values = list(values)
        if not values:
            raise AggregationError(f"series {sid!r} has no values to aggregate")
        out[sid] = float(np.mean(values))
    return out


def aggregate(values_by_series: Mapping[str, Iterable[float]]) -> float:
    """Two-stage unweighted mean: within each series, then across series."""
    per_series = aggregate_by_series(values_by_series)
    return float(np.mean(list(per_series.values())))
