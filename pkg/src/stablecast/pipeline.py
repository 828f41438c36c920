"""Full-run orchestration: fit, forecast, conformalize, ensemble, score,
test, and emit result artifacts.

A run is driven by a JSON :class:`RunConfig` and produces, in the output
directory: the long metric table (raw + normalized columns), one
methods-by-scenario normalized CSV per headline metric, one rank-test
report (JSON + pairwise CSV) per headline metric, plot data (JSON), and a
manifest with the config hash and a checksum per emitted file. Identical
config and seed reproduce every artifact byte-for-byte; the manifest's
stage timings are the single documented exception.

Artifacts are written to a staging directory and promoted at the end, so a
failing stage leaves no partial outputs behind.
"""

from __future__ import annotations

import hashlib
import json
import shutil
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .conformal import DEFAULT_CENTRAL_LEVELS, ConformalCalibrator, central_levels_to_quantiles
from .ensemble import ENSEMBLE_SIZES, ensemble_spec, build_ensemble_forecasts, rank_models
from .errors import ConfigurationError, NormalizationError, PipelineError, StablecastError
from .evaluate import (
    add_cell_rows,
    generate_rolling_forecasts,
    require_grid_coverage,
    score_cell,
    split_by_grid,
    validation_origin_grid,
)
from .forecasters import BUILTIN_FORECASTERS
from .matrix import ForecastMatrix, ForecastSchema, read_forecast_file
from .metrics import ACCURACY_METRICS, METRIC_NAMES, MQC, MQL, RMSSE, SMAPC
from .panel import FrequencyProfile, PanelSchema, TimeSeriesPanel, filter_min_length, load_panel
from .results import MetricTable, wide_table
from .schedule import (
    DEFAULT_BASELINE_R,
    RETRAIN,
    EvaluationConfig,
    build_origin_grid,
    build_retrain_plan,
)
from .simulate import SynthSpec, generate
from .stats import TestReport, pairwise_significance, rank_blocks
from .features import FeatureRecipe

HEADLINE_METRICS = (RMSSE, MQL, SMAPC, MQC)


def frequency_from(obj) -> FrequencyProfile:
    if isinstance(obj, str):
        if obj == "daily":
            return FrequencyProfile.daily()
        if obj == "weekly":
            return FrequencyProfile.weekly()
        raise ConfigurationError(f"unknown frequency {obj!r}")
    return FrequencyProfile(
        label=obj.get("label", "custom"),
        season_length=int(obj["season_length"]),
        periods_per_year=int(obj.get("periods_per_year", 52)),
    )


@dataclass(frozen=True)
class ModelSpec:
    name: str
    kind: str
    params: dict = field(default_factory=dict)

    def build(self):
        if self.kind not in BUILTIN_FORECASTERS:
            raise ConfigurationError(
                f"unknown model kind {self.kind!r}; built-ins: "
                f"{sorted(BUILTIN_FORECASTERS)}"
            )
        params = dict(self.params)
        if self.kind == "pooled_linear" and "recipe" in params:
            params["recipe"] = FeatureRecipe(**params["recipe"])
        return BUILTIN_FORECASTERS[self.kind](**params)


@dataclass(frozen=True)
class ExternalSource:
    path: Path
    model: str
    r: int
    schema: ForecastSchema = ForecastSchema()


@dataclass
class RunConfig:
    evaluation: EvaluationConfig
    frequency: FrequencyProfile
    output_dir: Path
    seed: int = 0
    workers: int = 1
    panel_path: Path | None = None
    panel_schema: PanelSchema = field(default_factory=PanelSchema)
    min_length: int | None = None
    synth: SynthSpec | None = None
    models: tuple[ModelSpec, ...] = ()
    external: tuple[ExternalSource, ...] = ()
    central_levels: tuple[float, ...] = DEFAULT_CENTRAL_LEVELS
    ensemble_sizes: tuple[int, ...] = ()
    ranking_metric: str = RMSSE
    stats_alpha: float = 0.05
    stats_blocking: str = "series"
    recalibrate_at_retrain: bool = False
    decimals: int = 3
    raw: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.panel_path is None and self.synth is None:
            raise ConfigurationError("config must declare a panel path or a synthetic spec")
        if self.panel_path is not None and not self.panel_path.exists():
            raise ConfigurationError(f"panel file not found: {self.panel_path}")
        if not self.models and not self.external:
            raise ConfigurationError("at least one model or external forecast source is required")
        names = [m.name for m in self.models] + [e.model for e in self.external]
        if len(names) != len(set(names)):
            raise ConfigurationError(f"duplicate model names in {sorted(names)}")
        for source in self.external:
            if not source.path.exists():
                raise ConfigurationError(f"external forecast file not found: {source.path}")
            if source.r not in self.evaluation.retrain_windows:
                raise ConfigurationError(
                    f"external source {source.model!r} declares r={source.r}, "
                    f"not a configured retraining window"
                )
        n_candidates = len(self.models) + len(self.external)
        for size in self.ensemble_sizes:
            if size not in ENSEMBLE_SIZES:
                raise ConfigurationError(f"ensemble size {size} not in {ENSEMBLE_SIZES}")
            if size > n_candidates:
                raise ConfigurationError(
                    f"ensemble of size {size} needs that many models, "
                    f"got {n_candidates}"
                )
        if self.ranking_metric not in METRIC_NAMES:
            raise ConfigurationError(f"unknown ranking metric {self.ranking_metric!r}")
        if self.ranking_metric not in ACCURACY_METRICS:
            raise ConfigurationError(
                f"ranking metric must be an accuracy metric, got {self.ranking_metric!r}"
            )
        if self.stats_blocking not in ("series", "series_model"):
            raise ConfigurationError(
                f"stats blocking must be 'series' or 'series_model', got {self.stats_blocking!r}"
            )
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "RunConfig":
        base = Path(base_dir) if base_dir is not None else Path.cwd()
        panel_cfg = data.get("panel", {})
        frequency = frequency_from(panel_cfg.get("frequency", "daily"))

        synth = None
        panel_path = None
        panel_schema = PanelSchema()
        min_length = panel_cfg.get("min_length")
        if "synthetic" in panel_cfg:
            raw = dict(panel_cfg["synthetic"])
            raw.pop("frequency", None)
            synth = SynthSpec(frequency=frequency, seed=int(data.get("seed", 0)), **raw)
        elif "path" in panel_cfg:
            panel_path = (base / panel_cfg["path"]).resolve()
            schema_cfg = panel_cfg.get("schema", {})
            panel_schema = PanelSchema(
                series_id=schema_cfg.get("series_id", "series_id"),
                timestamp=schema_cfg.get("timestamp", "timestamp"),
                value=schema_cfg.get("value", "value"),
                exogenous=tuple(schema_cfg.get("exogenous", ())),
                static=tuple(schema_cfg.get("static", ())),
            )

        eval_cfg = data.get("evaluation", {})
        central = tuple(eval_cfg.get("central_levels", DEFAULT_CENTRAL_LEVELS))
        baseline = eval_cfg.get(
            "baseline_r", DEFAULT_BASELINE_R.get(frequency.label)
        )
        if baseline is None:
            raise ConfigurationError(
                "baseline_r is required for custom-frequency panels"
            )
        evaluation = EvaluationConfig(
            horizon=int(eval_cfg["horizon"]),
            test_window=int(eval_cfg["test_window"]),
            retrain_windows=tuple(int(r) for r in eval_cfg["retrain_windows"]),
            baseline_r=int(baseline),
            season_length=frequency.season_length,
            quantile_levels=central_levels_to_quantiles(central) if central else (),
            validation_window=int(eval_cfg.get("validation_window", 0)),
            step=int(eval_cfg.get("step", 1)),
        )

        models = tuple(
            ModelSpec(
                name=m["name"],
                kind=m["kind"],
                params={k: v for k, v in m.items() if k not in ("name", "kind")},
            )
            for m in data.get("models", ())
        )
        external = tuple(
            ExternalSource(
                path=(base / e["path"]).resolve(),
                model=e["model"],
                r=int(e["r"]),
            )
            for e in data.get("external_forecasts", ())
        )
        stats_cfg = data.get("stats", {})
        config = cls(
            evaluation=evaluation,
            frequency=frequency,
            output_dir=(base / data.get("output_dir", "stablecast-out")).resolve(),
            seed=int(data.get("seed", 0)),
            workers=int(data.get("workers", 1)),
            panel_path=panel_path,
            panel_schema=panel_schema,
            min_length=None if min_length is None else int(min_length),
            synth=synth,
            models=models,
            external=external,
            central_levels=central,
            ensemble_sizes=tuple(int(s) for s in data.get("ensemble_sizes", ())),
            ranking_metric=data.get("ranking_metric", RMSSE),
            stats_alpha=float(stats_cfg.get("alpha", 0.05)),
            stats_blocking=stats_cfg.get("blocking", "series"),
            recalibrate_at_retrain=bool(data.get("recalibrate_at_retrain", False)),
            decimals=int(data.get("decimals", 3)),
            raw=data,
        )
        config.validate()
        return config

    @classmethod
    def from_json(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data, base_dir=path.parent)

    def config_hash(self) -> str:
        """Digest of the semantic configuration; deployment-only keys
        (output directory, worker count) do not change results and are
        excluded."""
        payload = {k: v for k, v in self.raw.items() if k not in ("output_dir", "workers")}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass
class RunManifest:
    config_hash: str
    engine_version: str
    seed: int
    stage_timings: dict[str, float]
    row_counts: dict[str, int]
    warnings: list[str]
    files: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "engine_version": self.engine_version,
            "seed": self.seed,
            "stage_timings": self.stage_timings,
            "row_counts": self.row_counts,
            "warnings": self.warnings,
            "files": self.files,
        }

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        return path


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


class _Runner:
    def __init__(self, config: RunConfig):
        self.config = config
        self.timings: dict[str, float] = {}
        self.counts: dict[str, int] = {}
        self.warnings: list[str] = []

    def _stage(self, name: str, fn):
        start = time.perf_counter()
        try:
            result = fn()
        except PipelineError:
            raise
        except StablecastError as exc:
            raise PipelineError(name, str(exc)) from exc
        except Exception as exc:  # tag unexpected failures with their stage too
            raise PipelineError(name, f"{type(exc).__name__}: {exc}") from exc
        self.timings[name] = time.perf_counter() - start
        return result

    # -- stages ----------------------------------------------------------

    def _load_panel(self) -> TimeSeriesPanel:
        cfg = self.config
        if cfg.synth is not None:
            panel = generate(cfg.synth)
        else:
            panel = load_panel(cfg.panel_path, cfg.panel_schema, cfg.frequency)
        if cfg.min_length is not None:
            panel = filter_min_length(panel, cfg.min_length)
        self.counts["panel_series"] = panel.n_series
        return panel

    def _forecast_cells(self, panel, grid, val_grid):
        """Point forecasts per (model, r): test matrix plus validation matrix."""
        cfg = self.config
        cells: dict[tuple[str, int], dict] = {}

        def run_builtin(spec: ModelSpec, r: int):
            plan = build_retrain_plan(grid, r)
            test = generate_rolling_forecasts(panel, spec.build(), grid, plan)
            val = None
            if val_grid is not None:
                val_plan = build_retrain_plan(val_grid, r)
                val = generate_rolling_forecasts(panel, spec.build(), val_grid, val_plan)
            return {"test": test, "val": val}

        jobs = [(spec, r) for spec in cfg.models for r in cfg.evaluation.retrain_windows]
        if cfg.workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                futures = {
                    (spec.name, r): pool.submit(run_builtin, spec, r) for spec, r in jobs
                }
                for key in sorted(futures):
                    cells[key] = futures[key].result()
        else:
            for spec, r in jobs:
                cells[(spec.name, r)] = run_builtin(spec, r)

        for source in cfg.external:
            matrices = read_forecast_file(source.path, source.schema, panel=panel)
            if source.model not in matrices:
                raise ConfigurationError(
                    f"{source.path} does not contain model {source.model!r}"
                )
            matrix = matrices[source.model]
            test = split_by_grid(matrix, grid)
            require_grid_coverage(test, grid, panel)
            val = split_by_grid(matrix, val_grid) if val_grid is not None else None
            if val is not None and len(val) == 0:
                val = None
            cells[(source.model, source.r)] = {"test": test, "val": val}

        self.counts["forecast_blocks"] = sum(len(c["test"]) for c in cells.values())
        return cells

    def _conformalize(self, cells, panel, grid):
        """Attach quantile tracks to each cell's test matrix."""
        cfg = self.config
        if not cfg.central_levels:
            return {key: cell["test"] for key, cell in cells.items()}
        expected_levels = central_levels_to_quantiles(cfg.central_levels)
        out = {}
        for key in sorted(cells):
            cell = cells[key]
            test = cell["test"]
            if test.has_quantiles:
                if test.quantile_levels != expected_levels:
                    self.warnings.append(
                        f"model {key[0]!r} r={key[1]}: supplied quantile levels "
                        f"differ from the configured set; scoring its own levels"
                    )
                out[key] = test
                continue
            if cell["val"] is None:
                self.warnings.append(
                    f"model {key[0]!r} r={key[1]}: no validation forecasts; "
                    f"point metrics only"
                )
                out[key] = test
                continue
            if cfg.recalibrate_at_retrain:
                out[key] = self._transform_with_recalibration(
                    key, test, cell["val"], panel, grid
                )
            else:
                calibrator = ConformalCalibrator(central_levels=cfg.central_levels).fit(
                    cell["val"], panel
                )
                out[key] = calibrator.transform(test)
        return out

    def _transform_with_recalibration(self, key, test, val, panel, grid):
        """Refresh calibration at every retrain origin with residuals of all
        already-realized test forecasts (targets before that origin)."""
        cfg = self.config
        plan = build_retrain_plan(grid, key[1])
        h = grid.horizon
        out = ForecastMatrix(h, quantile_levels=central_levels_to_quantiles(cfg.central_levels))
        segment_starts = [
            k for k, decision in enumerate(plan.decisions) if decision == RETRAIN
        ]
        bounds = segment_starts + [len(grid.origins)]
        for seg, start in enumerate(segment_starts):
            stop = bounds[seg + 1]
            cutoff = grid.origins[start]
            pool = ForecastMatrix(h)
            for sid, origin in val.keys():
                pool.set_point(sid, origin, val.point(sid, origin))
            for sid, origin in test.keys():
                if origin + h <= cutoff:
                    pool.set_point(sid, origin, test.point(sid, origin))
            calibrator = ConformalCalibrator(central_levels=cfg.central_levels).fit(
                pool, panel
            )
            segment = ForecastMatrix(h)
            for position in range(start, stop):
                origin = grid.origins[position]
                for sid in test.series_ids():
                    if (sid, origin) in test:
                        segment.set_point(sid, origin, test.point(sid, origin))
            transformed = calibrator.transform(segment)
            for sid, origin in transformed.keys():
                out.set_point(sid, origin, transformed.point(sid, origin))
                out.set_quantiles(sid, origin, transformed.quantiles(sid, origin))
        return out

    def _score(self, matrices, panel, grid) -> MetricTable:
        cfg = self.config
        table = MetricTable(baseline_r=cfg.evaluation.baseline_r)
        for (model, r) in sorted(matrices):
            scores = score_cell(matrices[(model, r)], panel, grid, cfg.frequency.season_length)
            for sid in scores.excluded_rmsse:
                self.warnings.append(
                    f"model {model!r} r={r}: series {sid!r} excluded from RMSSE "
                    f"(seasonally periodic training span)"
                )
            add_cell_rows(table, model, r, scores)
        return table

    def _ensembles(self, matrices, table, panel, grid) -> MetricTable:
        cfg = self.config
        if not cfg.ensemble_sizes:
            return table
        rankable = [
            model
            for model in table.models()
            if table.has_value(model, cfg.ranking_metric, cfg.evaluation.baseline_r)
        ]
        skipped = sorted(set(table.models()) - set(rankable))
        if skipped:
            self.warnings.append(
                f"models {skipped} lack a {cfg.ranking_metric} value at the "
                f"baseline window and are not rankable"
            )
        ranking = rank_models(
            table, cfg.ranking_metric, cfg.evaluation.baseline_r, models=rankable
        )
        per_r: dict[int, dict[str, ForecastMatrix]] = {}
        for (model, r), matrix in matrices.items():
            per_r.setdefault(r, {})[model] = matrix
        for size in sorted(cfg.ensemble_sizes):
            spec = ensemble_spec(ranking, size)
            for r in cfg.evaluation.retrain_windows:
                members = per_r.get(r, {})
                missing = [m for m in spec.members if m not in members]
                if missing:
                    raise ConfigurationError(
                        f"ensemble {spec.name} needs forecasts for {missing} at r={r}"
                    )
                chosen = {m: members[m] for m in spec.members}
                level_sets = {mat.quantile_levels for mat in chosen.values()}
                if not all(mat.has_quantiles for mat in chosen.values()) or len(level_sets) > 1:
                    chosen = {m: _points_only(mat) for m, mat in chosen.items()}
                    self.warnings.append(
                        f"ensemble {spec.name} r={r}: members lack shared quantile "
                        f"tracks; point-only combination"
                    )
                combined = build_ensemble_forecasts(chosen, spec)
                scores = score_cell(combined, panel, grid, cfg.frequency.season_length)
                add_cell_rows(table, spec.name, r, scores)
        self.counts["ranked_models"] = len(rankable)
        return table

    def _rank_tests(self, table: MetricTable) -> dict[str, TestReport]:
        cfg = self.config
        frame = table.to_frame()
        detail = frame[frame["series_id"].notna()]
        scenarios = sorted(cfg.evaluation.retrain_windows)
        if len(scenarios) < 2:
            return {}
        reports = {}
        for metric in HEADLINE_METRICS:
            rows = detail[detail["metric"] == metric]
            if rows.empty:
                continue
            pivot = rows.pivot_table(
                index=["series_id", "model"] if cfg.stats_blocking == "series_model"
                else "series_id",
                columns="r",
                values="value",
                aggfunc="mean",
            )
            pivot = pivot.reindex(columns=scenarios).dropna()
            if len(pivot) < 2:
                self.warnings.append(
                    f"rank test skipped for {metric}: fewer than 2 complete blocks"
                )
                continue
            ranks = rank_blocks(
                pivot.to_numpy(), treatments=tuple(f"r={r}" for r in scenarios)
            )
            reports[metric] = pairwise_significance(ranks, alpha=cfg.stats_alpha)
        return reports

    def _plot_data(self, table: MetricTable) -> dict:
        cfg = self.config
        frame = table.to_frame()
        aggregates = frame[frame["series_id"].isna() & frame["q"].isna()]
        curves = []
        for metric in (SMAPC, MQC):
            rows = aggregates[aggregates["metric"] == metric]
            for model in sorted(rows["model"].unique()):
                sub = rows[rows["model"] == model].sort_values("r")
                if sub["normalized_value"].isna().any():
                    continue  # normalization skipped (zero baseline)
                curves.append(
                    {
                        "metric": metric,
                        "model": model,
                        "r": [int(v) for v in sub["r"]],
                        "normalized_value": [float(v) for v in sub["normalized_value"]],
                    }
                )
        scatter = []
        for acc_metric, stab_metric in ((RMSSE, SMAPC), (MQL, MQC)):
            acc = aggregates[
                (aggregates["metric"] == acc_metric)
                & (aggregates["r"] == cfg.evaluation.baseline_r)
            ].set_index("model")["value"]
            stab = aggregates[
                (aggregates["metric"] == stab_metric)
                & (aggregates["r"] == cfg.evaluation.baseline_r)
            ].set_index("model")["value"]
            for model in sorted(set(acc.index) & set(stab.index)):
                scatter.append(
                    {
                        "model": model,
                        "accuracy_metric": acc_metric,
                        "stability_metric": stab_metric,
                        "accuracy": float(acc[model]),
                        "stability": float(stab[model]),
                    }
                )
        return {
            "baseline_r": cfg.evaluation.baseline_r,
            "stability_vs_retraining": curves,
            "accuracy_vs_stability": scatter,
        }

    # -- driver ----------------------------------------------------------

    def run(self) -> RunManifest:
        cfg = self.config
        panel = self._stage("panel", self._load_panel)

        def build_grids():
            length = panel.common_length()
            grid = build_origin_grid(length, cfg.evaluation)
            val_grid = (
                validation_origin_grid(length, cfg.evaluation)
                if cfg.evaluation.validation_window
                else None
            )
            return grid, val_grid

        grid, val_grid = self._stage("schedule", build_grids)
        self.counts["origins"] = len(grid.origins)

        cells = self._stage("forecast", lambda: self._forecast_cells(panel, grid, val_grid))
        matrices = self._stage("conformal", lambda: self._conformalize(cells, panel, grid))
        table = self._stage("metrics", lambda: self._score(matrices, panel, grid))
        table = self._stage(
            "ensemble", lambda: self._ensembles(matrices, table, panel, grid)
        )
        table = self._stage(
            "normalize", lambda: table.normalize_to_baseline(on_zero_baseline="skip")
        )
        self.warnings.extend(table.normalization_skips)
        self.counts["metric_rows"] = len(table)
        reports = self._stage("stats", lambda: self._rank_tests(table))
        manifest = self._stage("emit", lambda: self._emit(table, reports))
        return manifest

    def _emit(self, table: MetricTable, reports: dict[str, TestReport]) -> RunManifest:
        cfg = self.config
        out_dir = cfg.output_dir
        staging = out_dir / ".staging"
        if staging.exists():
            shutil.rmtree(staging)
        staging.mkdir(parents=True)
        try:
            table.to_csv(staging / "metrics_long.csv")
            available = {row.name for row in table.rows if row.series_id is None}
            for metric in HEADLINE_METRICS:
                if metric not in available:
                    continue
                try:
                    wide = wide_table(table, metric, normalized=True, decimals=cfg.decimals)
                except NormalizationError:
                    self.warnings.append(
                        f"no normalizable rows for {metric}; wide table skipped"
                    )
                    continue
                wide.to_csv(staging / f"normalized_{metric}.csv", index=False)
            for metric, report in sorted(reports.items()):
                report.to_json(staging / f"test_report_{metric}.json")
                report.pairwise_to_csv(staging / f"pairwise_{metric}.csv")
            plot = self._plot_data(table)
            (staging / "plot_data.json").write_text(
                json.dumps(plot, indent=2, sort_keys=True) + "\n"
            )

            files = {
                p.name: _sha256(p) for p in sorted(staging.iterdir()) if p.is_file()
            }
            manifest = RunManifest(
                config_hash=cfg.config_hash(),
                engine_version=__version__,
                seed=cfg.seed,
                stage_timings=dict(self.timings),
                row_counts=dict(self.counts),
                warnings=list(self.warnings),
                files=files,
            )
            manifest.to_json(staging / "manifest.json")
            for item in sorted(staging.iterdir()):
                item.replace(out_dir / item.name)
        finally:
            shutil.rmtree(staging, ignore_errors=True)
        return manifest


def _points_only(matrix: ForecastMatrix) -> ForecastMatrix:
    out = ForecastMatrix(matrix.horizon)
    for sid, origin in matrix.keys():
        out.set_point(sid, origin, matrix.point(sid, origin))
    return out


def run(config: RunConfig) -> RunManifest:
    """Execute the full pipeline; see the module docstring for artifacts."""
    config.validate()
    config.output_dir.mkdir(parents=True, exist_ok=True)
    return _Runner(config).run()


def reemit_tables(
    metrics_csv: str | Path,
    baseline_r: int,
    out_dir: str | Path,
    decimals: int = 3,
) -> list[Path]:
    """Rebuild the wide normalized tables from a stored long metric CSV."""
    table = MetricTable.read_csv(metrics_csv, baseline_r).normalize_to_baseline(
        on_zero_baseline="skip"
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    available = {row.name for row in table.rows if row.series_id is None}
    for metric in HEADLINE_METRICS:
        if metric not in available:
            continue
        path = out_dir / f"normalized_{metric}.csv"
        wide_table(table, metric, normalized=True, decimals=decimals).to_csv(
            path, index=False
        )
        written.append(path)
    return written
