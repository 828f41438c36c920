import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stablecast.panel import FrequencyProfile, TimeSeriesPanel


def make_panel(series: dict[str, list[float]], frequency=None, start="2021-01-01",
               exogenous=None, static=None) -> TimeSeriesPanel:
    """Panel from raw value lists with generated contiguous timestamps."""
    frequency = frequency or FrequencyProfile.daily()
    step = frequency.period_step or np.timedelta64(1, "D")
    values = {}
    timestamps = {}
    for sid, vals in series.items():
        vals = np.asarray(vals, dtype=float)
        values[sid] = vals
        timestamps[sid] = np.datetime64(start) + step * np.arange(len(vals))
    return TimeSeriesPanel(
        frequency=frequency,
        values=values,
        timestamps=timestamps,
        exogenous=exogenous or {},
        static_metadata=static or {},
    )


@pytest.fixture
def doubling_panel():
    """Series obeying y_t = 2 * y_{t-1} exactly; last values 16, 48, 3."""
    return make_panel(
        {
            "A": [1, 2, 4, 8, 16],
            "B": [3, 6, 12, 24, 48],
            "C": [0.75, 1.5, 3.0, 6.0, 12.0],
        }
    )
