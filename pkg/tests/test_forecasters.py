import numpy as np
import pytest

from stablecast.errors import FitError, InputError
from stablecast.features import FeatureRecipe
from stablecast.forecasters import PooledRegression, SeasonalNaive, fit_pooled_linear

from conftest import make_panel


class TestSeasonalNaive:
    def test_definition(self):
        values = list(range(20))
        panel = make_panel({"A": values})
        model = SeasonalNaive().fit(panel, up_to=14)
        preds = model.predict(panel, origin=14, horizon=7)
        np.testing.assert_array_equal(preds["A"], values[7:14])

    def test_recursive_beyond_one_season(self):
        panel = make_panel({"A": list(range(10))})
        model = SeasonalNaive(season_length=3).fit(panel, up_to=6)
        preds = model.predict(panel, origin=6, horizon=6)
        np.testing.assert_array_equal(preds["A"], [3, 4, 5, 3, 4, 5])

    def test_periodic_series_reproduced(self):
        base = [5.0, 1.0, 0.0, 2.0, 7.0, 3.0, 4.0]
        panel = make_panel({"A": base * 4})
        model = SeasonalNaive().fit(panel, up_to=21)
        preds = model.predict(panel, origin=21, horizon=7)
        np.testing.assert_array_equal(preds["A"], base)

    def test_frozen_model_uses_fresh_inputs(self):
        panel = make_panel({"A": list(range(30))})
        model = SeasonalNaive().fit(panel, up_to=14)
        late = model.predict(panel, origin=20, horizon=3)
        np.testing.assert_array_equal(late["A"], [13, 14, 15])

    def test_origin_beyond_data(self):
        panel = make_panel({"A": list(range(10))})
        model = SeasonalNaive().fit(panel, up_to=8)
        with pytest.raises(InputError, match="beyond observed"):
            model.predict(panel, origin=11, horizon=2)

    def test_get_params(self):
        assert SeasonalNaive(season_length=7).get_params() == {"season_length": 7}


class TestPooledRegression:
    def test_exact_fit_on_doubling_rule(self, doubling_panel):
        model = PooledRegression(recipe=FeatureRecipe(lags=(1,)), ridge_lambda=0.0)
        model.fit(doubling_panel, up_to=5)
        assert abs(model.coef_[0] - 2.0) < 1e-9
        preds = model.predict(doubling_panel, origin=5, horizon=1)
        assert abs(preds["A"][0] - 32.0) < 1e-9

    def test_recursive_substitution(self, doubling_panel):
        model = PooledRegression(recipe=FeatureRecipe(lags=(1,)), ridge_lambda=0.0)
        model.fit(doubling_panel, up_to=3)
        preds = model.predict(doubling_panel, origin=3, horizon=2)
        np.testing.assert_allclose(preds["C"], [6.0, 12.0], rtol=1e-9)

    def test_intercept_only_predicts_pooled_mean(self):
        panel = make_panel({"A": [4.0, 6.0], "B": [5.0, 5.0]})
        model = PooledRegression(recipe=FeatureRecipe()).fit(panel, up_to=2)
        preds = model.predict(panel, origin=2, horizon=3)
        np.testing.assert_allclose(preds["A"], [5.0, 5.0, 5.0], rtol=1e-12)
        np.testing.assert_allclose(preds["B"], [5.0, 5.0, 5.0], rtol=1e-12)

    def test_empty_design_is_fit_error(self):
        panel = make_panel({"A": [1, 2, 3]})
        with pytest.raises(FitError, match="empty design"):
            PooledRegression(recipe=FeatureRecipe(lags=(5,))).fit(panel, up_to=3)

    def test_more_columns_than_rows_rejected(self):
        panel = make_panel({"A": [1, 2, 3]})
        recipe = FeatureRecipe(lags=(1, 2))
        with pytest.raises(FitError, match="rows"):
            PooledRegression(recipe=recipe).fit(panel, up_to=3)

    def test_frozen_parameters_fresh_inputs(self, doubling_panel):
        model = PooledRegression(recipe=FeatureRecipe(lags=(1,)), ridge_lambda=0.0)
        model.fit(doubling_panel, up_to=3)
        preds = model.predict(doubling_panel, origin=5, horizon=1)
        assert abs(preds["A"][0] - 32.0) < 1e-9
        assert model.fitted_at_origin_ == 3

    def test_predict_before_fit_origin_rejected(self, doubling_panel):
        model = PooledRegression(recipe=FeatureRecipe(lags=(1,)))
        model.fit(doubling_panel, up_to=4)
        with pytest.raises(InputError, match="earlier origin"):
            model.predict(doubling_panel, origin=3, horizon=1)

    def test_parameter_sharing_duplicate_series(self):
        rng = np.random.default_rng(0)
        values = rng.poisson(8, 40).astype(float).tolist()
        panel = make_panel({"A": values, "B": values, "C": rng.poisson(5, 40).tolist()})
        recipe = FeatureRecipe(lags=(1, 2), rolling_mean_windows=(3,))
        model = PooledRegression(recipe=recipe).fit(panel, up_to=30)
        preds = model.predict(panel, origin=30, horizon=5)
        np.testing.assert_array_equal(preds["A"], preds["B"])

    def test_fit_is_bit_deterministic(self):
        rng = np.random.default_rng(1)
        panel = make_panel({"A": rng.normal(10, 2, 50).tolist()})
        recipe = FeatureRecipe(lags=(1, 7), rolling_mean_windows=(7,))
        a = PooledRegression(recipe=recipe).fit(panel, up_to=40)
        b = PooledRegression(recipe=recipe).fit(panel, up_to=40)
        assert np.array_equal(a.coef_, b.coef_)

    def test_static_codes_enter_prediction(self):
        panel = make_panel(
            {"A": [1.0] * 20, "B": [5.0] * 20},
            static={"A": {"tier": "low"}, "B": {"tier": "high"}},
        )
        recipe = FeatureRecipe(static_columns=("tier",))
        model = PooledRegression(recipe=recipe, ridge_lambda=0.0).fit(panel, up_to=20)
        preds = model.predict(panel, origin=20, horizon=2)
        np.testing.assert_allclose(preds["A"], [1.0, 1.0], atol=1e-9)
        np.testing.assert_allclose(preds["B"], [5.0, 5.0], atol=1e-9)

    def test_exogenous_columns_read_at_target_time(self):
        import pandas as pd

        promo = [0.0] * 10 + [1.0, 0.0, 1.0, 0.0]
        base = [2.0] * 14
        values = [b + 3.0 * p for b, p in zip(base, promo)]
        exog = {"A": pd.DataFrame({"promo": promo})}
        panel = make_panel({"A": values}, exogenous=exog)
        recipe = FeatureRecipe(external_columns=("promo",))
        model = PooledRegression(recipe=recipe, ridge_lambda=0.0).fit(panel, up_to=12)
        preds = model.predict(panel, origin=12, horizon=2)
        np.testing.assert_allclose(preds["A"], [5.0, 2.0], atol=1e-9)

    def test_get_params_round_trip(self):
        recipe = FeatureRecipe(lags=(1,))
        model = PooledRegression(recipe=recipe, ridge_lambda=0.5)
        params = model.get_params()
        assert params["ridge_lambda"] == 0.5
        clone = PooledRegression(**{k: v for k, v in params.items()})
        assert clone.ridge_lambda == 0.5


def test_fit_pooled_linear_helper(doubling_panel):
    model = fit_pooled_linear(
        doubling_panel, recipe=FeatureRecipe(lags=(1,)), up_to=5, ridge_lambda=0.0
    )
    assert abs(model.coef_[0] - 2.0) < 1e-9
