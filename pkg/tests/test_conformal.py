import numpy as np
import pytest

from stablecast.conformal import (
    ConformalCalibrator,
    calibrate,
    central_levels_to_quantiles,
)
from stablecast.errors import CalibrationError, ConfigurationError
from stablecast.matrix import ForecastMatrix

from conftest import make_panel
from _oracles import conformal_width


def residual_fixture(residuals, horizon=1):
    """Panel + zero forecasts so |y - yhat| equals the given residuals."""
    values = [0.0] + [float(r) for r in residuals]
    panel = make_panel({"A": values})
    matrix = ForecastMatrix(horizon)
    for origin in range(1, len(residuals) + 1):
        matrix.set_point("A", origin, [0.0] * horizon)
    return panel, matrix


class TestCentralLevels:
    def test_single_level(self):
        assert central_levels_to_quantiles((0.6,)) == (0.2, 0.5, 0.8)

    def test_standard_six_levels(self):
        got = central_levels_to_quantiles((0.6, 0.7, 0.8, 0.9, 0.95, 0.99))
        assert got == (
            0.005, 0.025, 0.05, 0.1, 0.15, 0.2, 0.5,
            0.8, 0.85, 0.9, 0.95, 0.975, 0.995,
        )
        assert len(got) == 13

    def test_empty_gives_median_only(self):
        assert central_levels_to_quantiles(()) == (0.5,)

    def test_out_of_range_rejected(self):
        with pytest.raises(ConfigurationError):
            central_levels_to_quantiles((1.0,))

    def test_duplicate_rejected(self):
        with pytest.raises(ConfigurationError):
            ConformalCalibrator(central_levels=(0.8, 0.8)).fit(
                *reversed(residual_fixture([1, 2, 3]))
            )


class TestCalibrate:
    def test_zero_residuals_zero_widths(self):
        panel = make_panel({"A": [2.0] * 10})
        matrix = ForecastMatrix(2)
        for origin in (4, 5, 6):
            matrix.set_point("A", origin, [2.0, 2.0])
        cal = calibrate(matrix, panel, central_levels=(0.6, 0.9))
        assert np.all(cal.widths_ == 0.0)

    def test_order_statistic_rank(self):
        panel, matrix = residual_fixture(range(1, 10))
        cal = calibrate(matrix, panel, central_levels=(0.8,))
        assert cal.widths_[0, 0] == 8.0
        assert cal.calibration_size_[0] == 9

    def test_rank_clamped_to_max(self):
        panel, matrix = residual_fixture(range(1, 10))
        cal = calibrate(matrix, panel, central_levels=(0.99,))
        assert cal.widths_[0, 0] == 9.0

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(7)
        residuals = rng.exponential(2.0, 37)
        panel, matrix = residual_fixture(residuals)
        levels = (0.5, 0.6, 0.8, 0.9, 0.95)
        cal = calibrate(matrix, panel, central_levels=levels)
        for j, c in enumerate(levels):
            assert cal.widths_[0, j] == conformal_width(residuals, c)

    def test_no_blocks_is_error(self):
        panel = make_panel({"A": [1.0] * 5})
        with pytest.raises(CalibrationError):
            calibrate(ForecastMatrix(1), panel)

    def test_missing_actuals_is_error(self):
        panel = make_panel({"A": [1.0] * 5})
        matrix = ForecastMatrix(3)
        matrix.set_point("A", 4, [1.0, 1.0, 1.0])
        with pytest.raises(CalibrationError, match="actuals"):
            calibrate(matrix, panel)


class TestApply:
    def test_symmetric_interval_arithmetic(self):
        panel, matrix = residual_fixture([3.0] * 5)
        cal = calibrate(matrix, panel, central_levels=(0.8,))
        points = ForecastMatrix(1)
        points.set_point("A", 2, [10.0])
        out = cal.transform(points)
        assert out.quantile_levels == (0.1, 0.5, 0.9)
        np.testing.assert_array_equal(out.quantiles("A", 2)[0], [7.0, 10.0, 13.0])

    def test_zero_widths_collapse_to_point(self):
        panel = make_panel({"A": [2.0] * 10})
        matrix = ForecastMatrix(2)
        for origin in (4, 5, 6):
            matrix.set_point("A", origin, [2.0, 2.0])
        cal = calibrate(matrix, panel, central_levels=(0.6, 0.7, 0.8, 0.9, 0.95, 0.99))
        out = cal.transform(matrix)
        tracks = out.quantiles("A", 4)
        assert tracks.shape == (2, 13)
        assert np.all(tracks == 2.0)

    def test_width_monotone_tracks_sorted(self):
        # m=9 residuals chosen so c=0.6 -> width 1 (rank 6) and c=0.8 -> 3 (rank 8)
        panel, matrix = residual_fixture([1, 1, 1, 1, 1, 1, 2, 3, 4])
        cal = ConformalCalibrator(central_levels=(0.6, 0.8)).fit(matrix, panel)
        assert list(cal.widths_[0]) == [1.0, 3.0]
        points = ForecastMatrix(1)
        points.set_point("A", 2, [10.0])
        tracks = cal.transform(points).quantiles("A", 2)[0]
        np.testing.assert_array_equal(tracks, [7.0, 9.0, 10.0, 11.0, 13.0])

    def test_horizon_beyond_calibration_rejected(self):
        panel, matrix = residual_fixture([1.0, 2.0, 3.0])
        cal = calibrate(matrix, panel, central_levels=(0.8,))
        points = ForecastMatrix(2)
        points.set_point("A", 1, [1.0, 1.0])
        with pytest.raises(CalibrationError, match="lead"):
            cal.transform(points)

    def test_unfitted_rejected(self):
        points = ForecastMatrix(1)
        points.set_point("A", 1, [1.0])
        with pytest.raises(CalibrationError, match="not fitted"):
            ConformalCalibrator().transform(points)


class TestProperties:
    def test_translation_invariance(self):
        rng = np.random.default_rng(11)
        base = rng.normal(10, 2, 30)
        for shift in (0.0, 5.0, -17.5):
            values = base + shift
            panel = make_panel({"A": values.tolist()})
            matrix = ForecastMatrix(1)
            for origin in range(5, 25):
                matrix.set_point("A", origin, [10.0 + shift])
            cal = calibrate(matrix, panel, central_levels=(0.6, 0.9))
            if shift == 0.0:
                reference = cal.widths_.copy()
            else:
                np.testing.assert_allclose(cal.widths_, reference, rtol=0, atol=1e-12)

    def test_tracks_never_cross(self):
        rng = np.random.default_rng(13)
        values = rng.poisson(6, 60).astype(float)
        panel = make_panel({"A": values.tolist()})
        matrix = ForecastMatrix(3)
        for origin in range(10, 40):
            matrix.set_point("A", origin, rng.normal(6, 1, 3))
        cal = calibrate(matrix, panel, central_levels=(0.6, 0.7, 0.8, 0.9, 0.95, 0.99))
        out = cal.transform(matrix)
        for sid, origin in out.keys():
            tracks = out.quantiles(sid, origin)
            assert np.all(np.diff(tracks, axis=1) >= 0)

    def test_per_series_pooling(self):
        panel = make_panel({"A": [0.0, 1.0, 1.0, 1.0], "B": [0.0, 5.0, 5.0, 5.0]})
        matrix = ForecastMatrix(1)
        for origin in (1, 2, 3):
            matrix.set_point("A", origin, [0.0])
            matrix.set_point("B", origin, [0.0])
        cal = calibrate(matrix, panel, central_levels=(0.8,), pool="per_series")
        assert cal.widths_by_series_["A"][0, 0] == 1.0
        assert cal.widths_by_series_["B"][0, 0] == 5.0

    def test_dump_csv(self, tmp_path):
        panel, matrix = residual_fixture(range(1, 10))
        cal = calibrate(matrix, panel, central_levels=(0.8, 0.9))
        path = cal.to_csv(tmp_path / "cal.csv")
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "lead,level,width,m"
        assert len(lines) == 3  # one lead, two levels
        assert lines[1] == "1,0.8,8.0,9"
        assert lines[2] == "1,0.9,9.0,9"
