"""Top-k forecast combination by simple averaging.

Base models are ranked on an aggregate accuracy metric at one retraining
window; an ensemble of size k averages the forecasts of the k best models,
pointwise for point forecasts and level-by-level for quantile tracks.
Composition is decided once and reused across every retraining window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import AlignmentError, InputError
from .matrix import ForecastMatrix
from .results import MetricTable

ENSEMBLE_SIZES = (2, 3, 4, 5)


@dataclass(frozen=True)
class ModelRanking:
    metric: str
    scenario_r: int
    entries: tuple[tuple[str, float], ...]

    def top(self, k: int) -> tuple[str, ...]:
        if k > len(self.entries):
            raise InputError(f"ranking holds {len(self.entries)} models, need {k}")
        return tuple(name for name, _ in self.entries[:k])


@dataclass(frozen=True)
class EnsembleSpec:
    name: str
    members: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.members) not in ENSEMBLE_SIZES:
            raise InputError(
                f"ensemble size must be one of {ENSEMBLE_SIZES}, got {len(self.members)}"
            )


def rank_models(
    table: MetricTable, metric: str, scenario_r: int, models: list[str] | None = None
) -> ModelRanking:
    """Ascending sort of models by their aggregate value; ties break
    lexicographically by model name."""
    entries = []
    for model in models if models is not None else table.models():
        entries.append((model, table.value(model, metric, scenario_r)))
    entries.sort(key=lambda item: (item[1], item[0]))
    return ModelRanking(metric=metric, scenario_r=scenario_r, entries=tuple(entries))


def ensemble_spec(ranking: ModelRanking, size: int) -> EnsembleSpec:
    return EnsembleSpec(name=f"Ens{size}A", members=ranking.top(size))


def build_ensemble_forecasts(
    members: Mapping[str, ForecastMatrix], spec: EnsembleSpec
) -> ForecastMatrix:
    """Unweighted pointwise mean over the member matrices.

    Members must share horizon, (series, origin) coverage, and quantile
    levels exactly; quantile tracks are averaged level-by-level (convex
    combinations preserve non-crossing).
    """
    missing = [name for name in spec.members if name not in members]
    if missing:
        raise InputError(f"no forecasts supplied for members {missing}")
    mats = [members[name] for name in spec.members]
    first, first_name = mats[0], spec.members[0]
    keys = first.keys()
    for name, mat in zip(spec.members[1:], mats[1:]):
        if mat.horizon != first.horizon:
            raise AlignmentError(
                f"{name!r} horizon {mat.horizon} != {first_name!r} horizon {first.horizon}"
            )
        if mat.quantile_levels != first.quantile_levels:
            raise AlignmentError(
                f"{name!r} quantile levels differ from {first_name!r}"
            )
        theirs = mat.keys()
        if theirs != keys:
            gone = sorted(set(keys) ^ set(theirs))[0]
            raise AlignmentError(
                f"coverage mismatch between {first_name!r} and {name!r}: "
                f"first differing block {gone}"
            )
    out = ForecastMatrix(first.horizon, quantile_levels=first.quantile_levels)
    with_quantiles = all(mat.has_quantiles for mat in mats)
    for key in keys:
        sid, origin = key
        out.set_point(sid, origin, np.mean([m.point(sid, origin) for m in mats], axis=0))
        if with_quantiles:
            out.set_quantiles(
                sid, origin, np.mean([m.quantiles(sid, origin) for m in mats], axis=0)
            )
    return out
