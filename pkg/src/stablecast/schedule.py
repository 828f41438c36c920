"""Rolling-origin evaluation grid and retrain/reuse plans.

The grid enumerates forecast origins over a held-out test window of length
``T`` with an expanding training window: origin ``n`` means the model may
train on the first ``n`` observations and must forecast leads ``1..h``
(array indices ``n .. n+h-1``). Every origin keeps its full forecast window
inside observed data, so with step 1 there are exactly ``T - h + 1`` origins.

A retrain plan marks, for a given retraining window ``r``, which origins
refit the model and which reuse the previous fit with fresh inputs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError, InputError

RETRAIN = "retrain"
REUSE = "reuse"

#: Conventional baseline retraining window per frequency label: weekly
#: refresh for daily data, every period for weekly data.
DEFAULT_BASELINE_R = {"daily": 7, "weekly": 1}


@dataclass(frozen=True)
class EvaluationConfig:
    """Parameters of one rolling-origin evaluation.

    ``validation_window`` is the stretch immediately before the test window
    reserved for conformal calibration; it must be at least twice the
    horizon so every lead collects enough residuals.
    """

    horizon: int
    test_window: int
    retrain_windows: tuple[int, ...]
    baseline_r: int
    season_length: int
    quantile_levels: tuple[float, ...] = ()
    validation_window: int = 0
    step: int = 1

    def __post_init__(self):
        object.__setattr__(self, "retrain_windows", tuple(self.retrain_windows))
        object.__setattr__(self, "quantile_levels", tuple(self.quantile_levels))
        if self.horizon < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.horizon > self.test_window:
            raise ConfigurationError(
                f"horizon ({self.horizon}) must not exceed test_window ({self.test_window})"
            )
        if self.step < 1:
            raise ConfigurationError("step must be >= 1")
        if self.season_length < 1:
            raise ConfigurationError("season_length must be >= 1")
        if not self.retrain_windows:
            raise ConfigurationError("at least one retraining window is required")
        for r in self.retrain_windows:
            if not 1 <= r <= self.test_window:
                raise ConfigurationError(
                    f"retraining window {r} outside [1, {self.test_window}]"
                )
        if self.baseline_r not in self.retrain_windows:
            raise ConfigurationError(
                f"baseline_r {self.baseline_r} not among retrain_windows "
                f"{self.retrain_windows}"
            )
        levels = self.quantile_levels
        if any(not 0.0 < q < 1.0 for q in levels):
            raise ConfigurationError("quantile levels must lie in (0, 1)")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ConfigurationError("quantile levels must be strictly increasing")
        if self.validation_window and self.validation_window < 2 * self.horizon:
            raise ConfigurationError(
                f"validation_window ({self.validation_window}) must be at least "
                f"twice the horizon ({2 * self.horizon})"
            )


@dataclass(frozen=True)
class OriginGrid:
    """Ordered forecast origins; each admits a full horizon of actuals."""

    origins: tuple[int, ...]
    horizon: int
    step: int = 1

    def __len__(self) -> int:
        return len(self.origins)


@dataclass(frozen=True)
class RetrainPlan:
    """Per-origin retrain/reuse decisions for retraining window ``r``."""

    r: int
    decisions: tuple[str, ...]

    @property
    def n_retrains(self) -> int:
        return sum(1 for d in self.decisions if d == RETRAIN)


def build_origin_grid(series_length: int, config: EvaluationConfig) -> OriginGrid:
    """Enumerate forecast origins over the last ``test_window`` periods.

    The first origin trains on everything before the test window; origins
    then advance by ``step`` while the full forecast window stays inside
    observed data.
    """
    T, h, step = config.test_window, config.horizon, config.step
    if series_length <= T:
        raise ConfigurationError(
            f"series length {series_length} too short: need more than "
            f"test_window ({T}) observations"
        )
    first = series_length - T
    origins = tuple(range(first, series_length - h + 1, step))
    return OriginGrid(origins=origins, horizon=h, step=step)


def build_retrain_plan(grid: OriginGrid, r: int) -> RetrainPlan:
    """Mark grid positions 0, r, 2r, ... as retrain events, the rest reuse."""
    if r < 1:
        raise ConfigurationError(f"retraining window must be >= 1, got {r}")
    decisions = tuple(
        RETRAIN if k % r == 0 else REUSE for k in range(len(grid.origins))
    )
    return RetrainPlan(r=r, decisions=decisions)


def consecutive_origin_pairs(grid: OriginGrid) -> list[tuple[int, int]]:
    """All adjacent (previous, current) origin pairs, in grid order."""
    if len(grid.origins) < 2:
        raise InputError("stability is undefined on a grid with fewer than 2 origins")
    return list(zip(grid.origins[:-1], grid.origins[1:]))


def export_plan_csv(grid: OriginGrid, plan: RetrainPlan, path: str | Path) -> Path:
    """Audit table with one row per origin: (origin_index, time_index, decision)."""
    path = Path(path)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["origin_index", "time_index", "decision"])
        for k, (origin, decision) in enumerate(zip(grid.origins, plan.decisions)):
            writer.writerow([k, origin, decision])
    return path
