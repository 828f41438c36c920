"""Friedman rank test with Nemenyi post-hoc pairwise comparison.

Blocks (rows) are ranked within themselves with midrank tie handling; the
Friedman chi-squared statistic tests whether treatment mean ranks differ,
and the Nemenyi critical difference decides which treatment pairs do. The
critical values are an embedded table of studentized-range quantiles
(infinite degrees of freedom) divided by sqrt(2), for alpha in
{0.01, 0.05, 0.10} and up to 20 treatments.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats as sps

from .errors import ConfigurationError, InputError, TableBoundsError

# studentized range q(1 - alpha, k, df=inf) / sqrt(2), k = 2..20
_NEMENYI_Q = {
    0.01: (
        2.575829, 2.913494, 3.113250, 3.254686, 3.363740,
        3.452213, 3.526471, 3.590339, 3.646292, 3.696021,
        3.740733, 3.781318, 3.818451, 3.852654, 3.884343,
        3.913850, 3.941446, 3.967357, 3.991770,
    ),
    0.05: (
        1.959964, 2.343701, 2.569032, 2.727774, 2.849705,
        2.948320, 3.030878, 3.101730, 3.163684, 3.218654,
        3.268004, 3.312739, 3.353618, 3.391230, 3.426041,
        3.458425, 3.488685, 3.517073, 3.543799,
    ),
    0.10: (
        1.644854, 2.052293, 2.291341, 2.459516, 2.588521,
        2.692732, 2.779884, 2.854606, 2.919889, 2.977768,
        3.029694, 3.076733, 3.119693, 3.159199, 3.195743,
        3.229723, 3.261461, 3.291224, 3.319233,
    ),
}


@dataclass(frozen=True)
class RankMatrix:
    """Within-block midranks, one row per block, one column per treatment."""

    ranks: np.ndarray
    treatments: tuple[str, ...]

    def __post_init__(self):
        ranks = np.asarray(self.ranks, dtype=float)
        object.__setattr__(self, "ranks", ranks)
        n, k = ranks.shape
        if n < 2 or k < 2:
            raise ConfigurationError(f"need N >= 2 blocks and k >= 2 treatments, got {n}x{k}")
        if len(self.treatments) != k:
            raise ConfigurationError("treatment labels do not match rank columns")

    @property
    def n_blocks(self) -> int:
        return self.ranks.shape[0]

    @property
    def n_treatments(self) -> int:
        return self.ranks.shape[1]

    def mean_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)


@dataclass(frozen=True)
class TestReport:
    treatments: tuple[str, ...]
    n_blocks: int
    friedman_statistic: float
    degrees_of_freedom: int
    p_value: float
    alpha: float
    critical_difference: float
    mean_ranks: tuple[float, ...]
    significant: tuple[tuple[bool, ...], ...]
    gate_enabled: bool
    gate_passed: bool

    def to_dict(self) -> dict:
        return {
            "treatments": list(self.treatments),
            "n_blocks": self.n_blocks,
            "friedman_statistic": self.friedman_statistic,
            "degrees_of_freedom": self.degrees_of_freedom,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "critical_difference": self.critical_difference,
            "mean_ranks": list(self.mean_ranks),
            "significant": [list(row) for row in self.significant],
            "gate_enabled": self.gate_enabled,
            "gate_passed": self.gate_passed,
        }

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path

    def pairwise_to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow([""] + list(self.treatments))
            for label, row in zip(self.treatments, self.significant):
                writer.writerow(
                    [label] + ["significant" if flag else "not" for flag in row]
                )
        return path


def rank_blocks(values, treatments=None, lower_is_better: bool = True) -> RankMatrix:
    """Rank each row; rank 1 goes to the best value, ties get midranks."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise InputError(f"values must be 2-D, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise InputError("values contain non-finite entries")
    if treatments is None:
        treatments = tuple(f"T{j + 1}" for j in range(values.shape[1]))
    signed = values if lower_is_better else -values
    ranks = np.apply_along_axis(sps.rankdata, 1, signed)
    return RankMatrix(ranks=ranks, treatments=tuple(treatments))


def friedman_test(ranks: RankMatrix) -> tuple[float, float]:
    """Chi-squared Friedman statistic and its p-value (k - 1 df).

    The chi-squared approximation is standard but loose for very small
    N; treat p-values with N < 10 as indicative.
    """
    n, k = ranks.n_blocks, ranks.n_treatments
    mean_ranks = ranks.mean_ranks()
    statistic = 12.0 * n / (k * (k + 1)) * float(np.sum((mean_ranks - (k + 1) / 2) ** 2))
    p_value = float(sps.chi2.sf(statistic, k - 1))
    return statistic, p_value


def nemenyi_cd(k: int, n_blocks: int, alpha: float = 0.05) -> float:
    """Critical difference in mean ranks: q_alpha(k) * sqrt(k(k+1) / (6N))."""
    if k < 2 or n_blocks < 2:
        raise ConfigurationError("need k >= 2 treatments and N >= 2 blocks")
    key = round(alpha, 10)
    if key not in _NEMENYI_Q:
        raise TableBoundsError(
            f"alpha {alpha} not tabulated; choose from {sorted(_NEMENYI_Q)}"
        )
    row = _NEMENYI_Q[key]
    if k - 2 >= len(row):
        raise TableBoundsError(f"k={k} exceeds tabulated maximum {len(row) + 1}")
    return row[k - 2] * math.sqrt(k * (k + 1) / (6.0 * n_blocks))


def pairwise_significance(
    ranks: RankMatrix, alpha: float = 0.05, require_friedman: bool = True
) -> TestReport:
    """Full report: Friedman gate, critical difference, pairwise matrix.

    Pair (i, j) is significant when |mean_rank_i - mean_rank_j| exceeds the
    critical difference. With the gate enabled and the Friedman test not
    rejecting at ``alpha``, all pairs are reported not-significant and
    ``gate_passed`` is False.
    """
    statistic, p_value = friedman_test(ranks)
    k, n = ranks.n_treatments, ranks.n_blocks
    cd = nemenyi_cd(k, n, alpha)
    mean_ranks = ranks.mean_ranks()
    gate_passed = p_value < alpha
    if require_friedman and not gate_passed:
        matrix = tuple(tuple(False for _ in range(k)) for _ in range(k))
    else:
        diffs = np.abs(mean_ranks[:, None] - mean_ranks[None, :])
        flags = (diffs > cd) & ~np.eye(k, dtype=bool)
        matrix = tuple(tuple(bool(v) for v in row) for row in flags)
    return TestReport(
        treatments=ranks.treatments,
        n_blocks=n,
        friedman_statistic=statistic,
        degrees_of_freedom=k - 1,
        p_value=p_value,
        alpha=alpha,
        critical_difference=cd,
        mean_ranks=tuple(float(v) for v in mean_ranks),
        significant=matrix,
        gate_enabled=require_friedman,
        gate_passed=gate_passed,
    )
