"""Exception hierarchy shared across the package.

Everything raised on purpose derives from :class:`StablecastError`, split
into configuration problems (bad inputs that a caller can fix) and runtime
problems (data that violates a contract mid-computation).
"""


class StablecastError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(StablecastError):
    """A declared column or field is missing or malformed."""


class PanelValidationError(StablecastError):
    """Panel data violates an invariant (ordering, duplicates, finiteness)."""


class EmptyPanelError(StablecastError):
    """An operation produced or received a panel with zero series."""


class ConfigurationError(StablecastError):
    """An evaluation or run configuration is inconsistent."""


class FitError(StablecastError):
    """Model fitting failed (degenerate design, no rows)."""


class InputError(StablecastError):
    """A metric or operation received inputs outside its contract."""


class CompletenessError(InputError):
    """A forecast block is missing lead times it declared."""


class MonotonicityError(InputError):
    """Quantile tracks cross (values decrease as the level increases)."""


class AlignmentError(InputError):
    """Forecast matrices do not share identical coverage."""


class CalibrationError(StablecastError):
    """Conformal calibration is impossible or incomplete."""


class MetricUndefinedError(StablecastError):
    """A metric has no defined value for the given inputs."""


class AggregationError(StablecastError):
    """Aggregation over an empty value set was requested."""


class NormalizationError(StablecastError):
    """Baseline normalization failed (missing or zero baseline)."""


class TableBoundsError(StablecastError):
    """A critical-value lookup fell outside the embedded table."""


class PipelineError(StablecastError):
    """A pipeline stage failed; carries the stage name for diagnostics."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
