import numpy as np
import pytest

from stablecast.errors import (
    CompletenessError,
    InputError,
    MonotonicityError,
    SchemaError,
)
from stablecast.matrix import (
    ForecastMatrix,
    ForecastSchema,
    forecasts_to_frame,
    ingest_external_forecasts,
    read_forecast_file,
    write_forecasts,
)

from conftest import make_panel


def write_rows(path, rows, header="model,series_id,origin_timestamp,lead,value,q"):
    lines = [header] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


class TestForecastMatrix:
    def test_block_shape_enforced(self):
        matrix = ForecastMatrix(3)
        with pytest.raises(InputError):
            matrix.set_point("A", 5, [1.0, 2.0])

    def test_quantile_monotonicity_enforced(self):
        matrix = ForecastMatrix(2, quantile_levels=(0.1, 0.9))
        with pytest.raises(MonotonicityError):
            matrix.set_quantiles("A", 5, [[2.0, 1.0], [1.0, 2.0]])

    def test_keys_sorted(self):
        matrix = ForecastMatrix(1)
        matrix.set_point("B", 2, [1.0])
        matrix.set_point("A", 9, [1.0])
        matrix.set_point("A", 2, [1.0])
        assert matrix.keys() == [("A", 2), ("A", 9), ("B", 2)]


class TestIngestion:
    def test_point_count(self, tmp_path):
        rows = [
            ("m", "A", o, k, float(10 * o + k), "")
            for o in (4, 5)
            for k in (1, 2, 3)
        ]
        path = write_rows(tmp_path / "f.csv", rows)
        matrix = ingest_external_forecasts(path)
        assert len(matrix) == 2
        assert matrix.horizon == 3
        np.testing.assert_array_equal(matrix.point("A", 4), [41.0, 42.0, 43.0])

    def test_single_quantile_track(self, tmp_path):
        rows = [("m", "A", 4, k, float(k), "") for k in (1, 2)]
        rows += [("m", "A", 4, k, float(k), 0.5) for k in (1, 2)]
        matrix = ingest_external_forecasts(write_rows(tmp_path / "f.csv", rows))
        assert matrix.quantile_levels == (0.5,)
        np.testing.assert_array_equal(matrix.quantiles("A", 4)[:, 0], [1.0, 2.0])

    def test_missing_lead_names_block(self, tmp_path):
        rows = [("m", "A", 4, k, 1.0, "") for k in (1, 3)]
        path = write_rows(tmp_path / "f.csv", rows)
        with pytest.raises(CompletenessError, match=r"'A', origin 4"):
            ingest_external_forecasts(path)

    def test_missing_quantile_lead(self, tmp_path):
        rows = [("m", "A", 4, k, 1.0, "") for k in (1, 2)]
        rows += [("m", "A", 4, 1, 1.0, 0.5)]
        with pytest.raises(CompletenessError, match="lead 2"):
            ingest_external_forecasts(write_rows(tmp_path / "f.csv", rows))

    def test_crossing_tracks_reject_or_sort(self, tmp_path):
        rows = [("m", "A", 4, 1, 5.0, "")]
        rows += [("m", "A", 4, 1, 9.0, 0.1), ("m", "A", 4, 1, 3.0, 0.9)]
        path = write_rows(tmp_path / "f.csv", rows)
        with pytest.raises(MonotonicityError):
            ingest_external_forecasts(path)
        matrix = ingest_external_forecasts(path, on_crossing="sort")
        np.testing.assert_array_equal(matrix.quantiles("A", 4)[0], [3.0, 9.0])

    def test_multiple_models_need_selector(self, tmp_path):
        rows = [("m1", "A", 4, 1, 1.0, ""), ("m2", "A", 4, 1, 2.0, "")]
        path = write_rows(tmp_path / "f.csv", rows)
        with pytest.raises(SchemaError, match="m1"):
            ingest_external_forecasts(path)
        matrix = ingest_external_forecasts(path, model="m2")
        assert matrix.point("A", 4)[0] == 2.0

    def test_timestamp_origins_mapped_through_panel(self, tmp_path):
        panel = make_panel({"A": [1.0] * 10}, start="2021-01-01")
        # origin timestamp 2021-01-05 is index 4, so origin (train size) = 5
        rows = [("m", "A", "2021-01-05", k, 1.0, "") for k in (1, 2)]
        path = write_rows(tmp_path / "f.csv", rows)
        matrix = ingest_external_forecasts(path, panel=panel)
        assert matrix.origins("A") == [5]

    def test_timestamp_origins_require_panel(self, tmp_path):
        rows = [("m", "A", "2021-01-05", 1, 1.0, "")]
        path = write_rows(tmp_path / "f.csv", rows)
        with pytest.raises(SchemaError, match="panel"):
            ingest_external_forecasts(path)


class TestRoundTrip:
    def test_write_then_read(self, tmp_path):
        panel = make_panel({"A": list(range(12)), "B": list(range(12))})
        matrix = ForecastMatrix(2, quantile_levels=(0.25, 0.5, 0.75))
        rng = np.random.default_rng(3)
        for sid in ("A", "B"):
            for origin in (8, 9):
                point = rng.normal(5, 1, 2)
                matrix.set_point(sid, origin, point)
                widths = np.array([1.0, 2.0])
                tracks = np.column_stack([point - widths, point, point + widths])
                matrix.set_quantiles(sid, origin, tracks)
        path = write_forecasts({"mymodel": matrix}, panel, tmp_path / "fc.csv")
        back = read_forecast_file(path, panel=panel)["mymodel"]
        assert back.equals(matrix, atol=1e-12)

    def test_frame_layout(self):
        panel = make_panel({"A": list(range(6))})
        matrix = ForecastMatrix(2)
        matrix.set_point("A", 4, [1.5, 2.5])
        frame = forecasts_to_frame(matrix, "m", panel)
        assert list(frame.columns) == [
            "model", "series_id", "origin_timestamp", "lead", "value", "q",
        ]
        assert frame["origin_timestamp"].iloc[0] == "2021-01-04"
        assert frame["q"].isna().all()

    def test_custom_schema_names(self, tmp_path):
        panel = make_panel({"A": list(range(6))})
        matrix = ForecastMatrix(1)
        matrix.set_point("A", 4, [3.0])
        schema = ForecastSchema(model="method", value="yhat")
        path = tmp_path / "fc.csv"
        forecasts_to_frame(matrix, "m", panel, schema).to_csv(path, index=False)
        back = read_forecast_file(path, schema=schema, panel=panel)["m"]
        assert back.point("A", 4)[0] == 3.0
