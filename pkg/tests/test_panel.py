import numpy as np
import pytest

from stablecast.errors import EmptyPanelError, PanelValidationError, SchemaError
from stablecast.panel import (
    FrequencyProfile,
    PanelSchema,
    filter_min_length,
    load_panel,
    save_panel,
    summarize,
)

from conftest import make_panel


def write_csv(path, text):
    path.write_text(text.strip() + "\n")
    return path


class TestLoadPanel:
    def test_three_row_round_trip(self, tmp_path):
        path = write_csv(
            tmp_path / "p.csv",
            "series_id,timestamp,value\n"
            "A,2021-01-01,1\nA,2021-01-02,2\nA,2021-01-03,3",
        )
        panel = load_panel(path)
        assert panel.n_series == 1
        assert panel.length("A") == 3
        np.testing.assert_array_equal(panel.values["A"], [1.0, 2.0, 3.0])

    def test_duplicate_timestamp_names_series(self, tmp_path):
        path = write_csv(
            tmp_path / "p.csv",
            "series_id,timestamp,value\n"
            "A,2021-01-01,1\nA,2021-01-01,2",
        )
        with pytest.raises(PanelValidationError, match="'A'"):
            load_panel(path)

    def test_two_series_different_lengths(self, tmp_path):
        rows = ["series_id,timestamp,value"]
        start = np.datetime64("2019-01-01")
        for i in range(730):
            rows.append(f"L,{start + i},{i % 5}")
        for i in range(10):
            rows.append(f"S,{start + i},{i}")
        path = write_csv(tmp_path / "p.csv", "\n".join(rows))
        panel = load_panel(path)
        assert panel.n_series == 2
        assert panel.length("L") == 730
        assert panel.length("S") == 10

    def test_missing_column_named(self, tmp_path):
        path = write_csv(tmp_path / "p.csv", "series_id,timestamp\nA,2021-01-01")
        with pytest.raises(SchemaError, match="'value'"):
            load_panel(path)

    def test_non_finite_value_reports_row(self, tmp_path):
        path = write_csv(
            tmp_path / "p.csv",
            "series_id,timestamp,value\nA,2021-01-01,1\nA,2021-01-02,oops",
        )
        with pytest.raises(PanelValidationError, match="row 1"):
            load_panel(path)

    def test_interior_gap_rejected(self, tmp_path):
        path = write_csv(
            tmp_path / "p.csv",
            "series_id,timestamp,value\n"
            "A,2021-01-01,1\nA,2021-01-03,2",
        )
        with pytest.raises(PanelValidationError, match="gap"):
            load_panel(path)

    def test_unsorted_input_is_sorted(self, tmp_path):
        path = write_csv(
            tmp_path / "p.csv",
            "series_id,timestamp,value\n"
            "A,2021-01-02,2\nA,2021-01-01,1",
        )
        panel = load_panel(path)
        np.testing.assert_array_equal(panel.values["A"], [1.0, 2.0])

    def test_exogenous_and_static_attached(self, tmp_path):
        path = write_csv(
            tmp_path / "p.csv",
            "series_id,timestamp,value,price,store\n"
            "A,2021-01-01,1,9.5,s1\nA,2021-01-02,2,9.0,s1",
        )
        schema = PanelSchema(exogenous=("price",), static=("store",))
        panel = load_panel(path, schema)
        assert list(panel.exogenous["A"]["price"]) == [9.5, 9.0]
        assert panel.static_metadata["A"]["store"] == "s1"

    def test_inconstant_static_rejected(self, tmp_path):
        path = write_csv(
            tmp_path / "p.csv",
            "series_id,timestamp,value,store\n"
            "A,2021-01-01,1,s1\nA,2021-01-02,2,s2",
        )
        with pytest.raises(PanelValidationError, match="store"):
            load_panel(path, PanelSchema(static=("store",)))


class TestRoundTrip:
    def test_save_load_value_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        panel = make_panel(
            {"A": rng.normal(10, 3, 40).tolist(), "B": rng.poisson(4, 40).tolist()}
        )
        out = save_panel(panel, tmp_path / "out.csv")
        again = load_panel(out)
        assert again.series_ids == panel.series_ids
        for sid in panel.series_ids:
            np.testing.assert_array_equal(again.values[sid], panel.values[sid])
            np.testing.assert_array_equal(again.timestamps[sid], panel.timestamps[sid])

    def test_weekly_round_trip(self, tmp_path):
        panel = make_panel(
            {"W": [1, 2, 3, 4]}, frequency=FrequencyProfile.weekly(), start="2021-01-04"
        )
        again = load_panel(
            save_panel(panel, tmp_path / "w.csv"), frequency=FrequencyProfile.weekly()
        )
        np.testing.assert_array_equal(again.values["W"], panel.values["W"])


class TestFilterMinLength:
    def test_length_threshold_730(self):
        panel = make_panel({"A": [0.0] * 730, "B": [0.0] * 729})
        kept = filter_min_length(panel, 730)
        assert kept.series_ids == ("A",)

    def test_length_threshold_157_weekly(self):
        panel = make_panel(
            {"A": list(range(157)), "B": list(range(156))},
            frequency=FrequencyProfile.weekly(),
        )
        kept = filter_min_length(panel, 157)
        assert kept.series_ids == ("A",)

    def test_min_obs_one_is_identity(self):
        panel = make_panel({"A": [1, 2], "B": [3]})
        kept = filter_min_length(panel, 1)
        assert kept.series_ids == panel.series_ids

    def test_idempotent(self):
        panel = make_panel({"A": [1] * 10, "B": [2] * 5})
        once = filter_min_length(panel, 6)
        twice = filter_min_length(once, 6)
        assert once.series_ids == twice.series_ids

    def test_empty_result_raises(self):
        panel = make_panel({"A": [1, 2]})
        with pytest.raises(EmptyPanelError):
            filter_min_length(panel, 3)


class TestSummarize:
    def test_counts(self):
        panel = make_panel({"A": [1, 2, 3], "B": [1, 2, 3, 4, 5]})
        summary = summarize(panel)
        assert summary.n_series == 2
        assert summary.min_length == 3
        assert summary.max_length == 5
        assert summary.frequency == "daily"

    def test_single_constant_series(self):
        summary = summarize(make_panel({"A": [7] * 10}))
        assert (summary.n_series, summary.min_length, summary.max_length) == (1, 10, 10)

    def test_min_length_after_filter(self):
        panel = make_panel({"A": [0] * 12, "B": [0] * 8, "C": [0] * 20})
        assert summarize(filter_min_length(panel, 10)).min_length >= 10


class TestFrequencyProfile:
    def test_daily_weekly_season_lengths(self):
        assert FrequencyProfile.daily().season_length == 7
        assert FrequencyProfile.weekly().season_length == 52

    def test_wrong_season_length_rejected(self):
        with pytest.raises(PanelValidationError):
            FrequencyProfile("daily", 5, 365)

    def test_custom_skips_contiguity(self):
        freq = FrequencyProfile("custom", 24, 365)
        values = {"A": np.array([1.0, 2.0])}
        ts = {"A": np.array(["2021-01-01", "2021-03-05"], dtype="datetime64[D]")}
        from stablecast.panel import TimeSeriesPanel

        TimeSeriesPanel(frequency=freq, values=values, timestamps=ts)
