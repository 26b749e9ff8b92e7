from __future__ import annotations

import numpy as np
import pytest

from conftest import SYNTHETIC_CANDIDATES, build_series, synthetic_market
from drspot.regression import (
    FULL_FEATURES,
    DimensionMismatchError,
    InsufficientDataError,
    LengthMismatchError,
    RankDeficientError,
    RegressionModel,
    SignificanceLevel,
    ZeroMeanActualError,
    build_design_row,
    design_matrix,
    ferms,
    fit_ols,
    forward_select,
    predict,
    price_vector,
    significance_level,
    validate_feature_spec,
)


class TestFeatureSpec:
    def test_full_feature_set_is_valid(self):
        assert validate_feature_spec(FULL_FEATURES) == FULL_FEATURES
        assert len(FULL_FEATURES) == 31

    def test_intercept_must_be_first(self):
        with pytest.raises(ValueError):
            validate_feature_spec(("demand", "intercept"))
        with pytest.raises(ValueError):
            validate_feature_spec(("demand",))

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            validate_feature_spec(("intercept", "demand", "demand"))

    def test_unknown_feature_rejected(self):
        with pytest.raises(ValueError):
            validate_feature_spec(("intercept", "hour24"))


class TestDesignRow:
    def _series_for_hour(self, hour_of_day):
        # one day starting Monday midnight; hour_of_day k is record k-1
        series = synthetic_market(1, seed=0)
        return series[hour_of_day - 1]

    def test_hour24_is_reference_level(self):
        record, cal = self._series_for_hour(24)
        assert cal.hour_of_day == 24
        row = build_design_row(record, cal, FULL_FEATURES)
        hour_block = row[1:24]
        assert np.all(hour_block == 0.0)

    def test_hour5_one_hot(self):
        record, cal = self._series_for_hour(5)
        row = build_design_row(record, cal, FULL_FEATURES)
        hour_block = row[1:24]
        assert hour_block[4] == 1.0 and hour_block.sum() == 1.0

    def test_numeric_features_pass_through(self):
        record, cal = self._series_for_hour(14)
        row = build_design_row(record, cal, ("intercept", "demand", "temperature", "dew_point", "month"))
        assert row[0] == 1.0
        assert row[1] == record.demand
        assert row[2] == record.dry_bulb_temp
        assert row[3] == record.dew_point
        assert row[4] == float(cal.month)

    def test_month_is_numeric_not_dummy(self):
        record, cal = self._series_for_hour(1)
        row = build_design_row(record, cal, ("intercept", "month"))
        assert row[1] == 6.0  # June start

    def test_weekend_flags(self):
        series = synthetic_market(7, seed=0)  # Monday..Sunday
        sat_record, sat_cal = series[5 * 24 + 3]
        row = build_design_row(sat_record, sat_cal, ("intercept", "saturday", "sunday"))
        assert row[1] == 1.0 and row[2] == 0.0

    def test_design_matrix_matches_row_builder(self):
        series = synthetic_market(2, seed=1)
        matrix = design_matrix(series, FULL_FEATURES)
        for i in (0, 17, 47):
            record, cal = series[i]
            np.testing.assert_array_equal(matrix[i], build_design_row(record, cal, FULL_FEATURES))

    def test_design_matrix_demand_override(self):
        series = synthetic_market(1, seed=1)
        override = np.arange(24, dtype=float)
        spec = ("intercept", "demand", "temperature")
        matrix = design_matrix(series, spec, demand=override)
        assert np.array_equal(matrix[:, 1], override)
        assert np.array_equal(matrix[:, 2], series.dry_bulb_temp)


class TestFitOls:
    def test_constant_fit(self):
        model = fit_ols(np.ones((3, 1)), np.array([3.0, 3.0, 3.0]))
        assert model.coefficients[0] == pytest.approx(3.0)
        assert model.residual_variance == pytest.approx(0.0)
        assert model.n_obs == 3

    def test_exact_line(self):
        x = np.array([0.0, 1.0, 2.0])
        X = np.column_stack([np.ones(3), x])
        y = 1.0 + 2.0 * x
        model = fit_ols(X, y)
        np.testing.assert_allclose(model.coefficients, [1.0, 2.0], atol=1e-12)
        assert model.residual_variance == pytest.approx(0.0, abs=1e-24)

    def test_duplicate_column_rank_deficient(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=20)
        X = np.column_stack([np.ones(20), x, x])
        with pytest.raises(RankDeficientError) as excinfo:
            fit_ols(X, rng.normal(size=20), spec=("intercept", "a", "b"))
        assert excinfo.value.column == "b"

    def test_zero_column_rank_deficient(self):
        rng = np.random.default_rng(6)
        X = np.column_stack([np.ones(20), np.zeros(20)])
        with pytest.raises(RankDeficientError):
            fit_ols(X, rng.normal(size=20))

    def test_insufficient_data(self):
        X = np.column_stack([np.ones(2), np.array([0.0, 1.0])])
        with pytest.raises(InsufficientDataError):
            fit_ols(X, np.array([1.0, 3.0]))  # n == m

    def test_t_values_match_invariant(self):
        rng = np.random.default_rng(7)
        X = np.column_stack([np.ones(100), rng.normal(size=(100, 3))])
        y = X @ np.array([1.0, 2.0, -3.0, 0.5]) + rng.normal(0, 0.5, 100)
        model = fit_ols(X, y)
        np.testing.assert_allclose(model.t_values, model.coefficients / model.std_errors)
        assert np.all(model.std_errors > 0)

    def test_residual_orthogonality(self):
        rng = np.random.default_rng(8)
        X = np.column_stack([np.ones(200), rng.normal(size=(200, 6))])
        y = rng.normal(size=200) * 50
        model = fit_ols(X, y)
        residual = y - X @ model.coefficients
        assert np.abs(X.T @ residual).max() <= 1e-6 * np.abs(y).max()

    def test_exact_recovery_noiseless(self):
        rng = np.random.default_rng(9)
        X = np.column_stack([np.ones(120), rng.normal(size=(120, 5))])
        beta = rng.uniform(0.5, 5.0, 6) * rng.choice([-1, 1], 6)
        model = fit_ols(X, X @ beta)
        np.testing.assert_allclose(model.coefficients, beta, rtol=1e-8)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(10)
        X = np.column_stack([np.ones(80), rng.normal(size=(80, 4))])
        y = rng.normal(size=80)
        perm = rng.permutation(80)
        a = fit_ols(X, y).coefficients
        b = fit_ols(X[perm], y[perm]).coefficients
        np.testing.assert_allclose(a, b, rtol=1e-10)


class TestPredict:
    def test_zero_coefficients(self):
        model = fit_ols(np.column_stack([np.ones(3), [1.0, 2.0, 3.0]]), np.zeros(3))
        np.testing.assert_array_equal(predict(model, np.eye(2)), np.zeros(2))

    def test_intercept_only_constant(self):
        model = fit_ols(np.ones((5, 1)), np.full(5, 7.5))
        np.testing.assert_allclose(predict(model, np.ones((3, 1))), np.full(3, 7.5))

    def test_noiseless_round_trip(self):
        rng = np.random.default_rng(11)
        X = np.column_stack([np.ones(100), rng.normal(size=(100, 4))])
        beta = rng.uniform(1, 4, 5)
        y = X @ beta
        model = fit_ols(X, y)
        np.testing.assert_allclose(predict(model, X), y, rtol=1e-8)

    def test_dimension_mismatch(self):
        model = fit_ols(np.ones((3, 1)), np.array([1.0, 1.0, 1.0]))
        with pytest.raises(DimensionMismatchError):
            predict(model, np.ones((2, 3)))


class TestFerms:
    def test_perfect_forecast(self):
        assert ferms([100.0, 100.0], [100.0, 100.0]) == 0.0

    def test_symmetric_errors(self):
        assert ferms([110.0, 90.0], [100.0, 100.0]) == pytest.approx(10.0)

    def test_single_point(self):
        assert ferms([60.0], [50.0]) == pytest.approx(20.0)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            ferms([1.0, 2.0], [1.0])
        with pytest.raises(LengthMismatchError):
            ferms([], [])

    def test_zero_mean_actual(self):
        with pytest.raises(ZeroMeanActualError):
            ferms([1.0, -1.0], [1.0, -1.0])

    def test_scale_invariance(self):
        rng = np.random.default_rng(12)
        actual = rng.uniform(10, 100, 50)
        forecast = actual + rng.normal(0, 5, 50)
        base = ferms(forecast, actual)
        for c in (0.1, 3.0, 250.0):
            assert ferms(c * forecast, c * actual) == pytest.approx(base, rel=1e-12)

    def test_non_negative_and_zero_iff_equal(self):
        rng = np.random.default_rng(13)
        actual = rng.uniform(10, 100, 20)
        assert ferms(actual, actual) == 0.0
        assert ferms(actual + 0.01, actual) > 0.0


class TestSignificance:
    def test_representative_magnitudes(self):
        assert significance_level(20.66) is SignificanceLevel.ONE_PERCENT
        assert significance_level(0.02) is SignificanceLevel.NOT_SIGNIFICANT
        assert significance_level(-1.5) is SignificanceLevel.TEN_PERCENT

    def test_thresholds_inclusive(self):
        assert significance_level(2.45) is SignificanceLevel.ONE_PERCENT
        assert significance_level(1.69) is SignificanceLevel.FIVE_PERCENT
        assert significance_level(1.3) is SignificanceLevel.TEN_PERCENT
        assert significance_level(1.2999) is SignificanceLevel.NOT_SIGNIFICANT

    def test_even_function(self):
        for t in (0.0, 0.5, 1.3, 1.5, 1.69, 2.0, 2.45, 10.0):
            assert significance_level(t) is significance_level(-t)

    def test_invalid_thresholds(self):
        with pytest.raises(ValueError):
            significance_level(1.0, thresholds=(2.0, 1.0, 3.0))
        with pytest.raises(ValueError):
            significance_level(1.0, thresholds=(0.0, 1.0, 2.0))

    def test_star_markers(self):
        assert SignificanceLevel.ONE_PERCENT.value == "**"
        assert SignificanceLevel.FIVE_PERCENT.value == "*"
        assert SignificanceLevel.TEN_PERCENT.value == "+"
        assert SignificanceLevel.NOT_SIGNIFICANT.value == ""


class TestForwardSelect:
    def _demand_driven_series(self, days, seed, noise=0.1):
        rng = np.random.default_rng(seed)
        n = days * 24
        demand = rng.uniform(1000, 3000, n)
        temp = rng.uniform(60, 90, n)      # pure noise w.r.t. price
        dew = rng.uniform(50, 70, n)       # pure noise w.r.t. price
        price = 5.0 + 0.01 * demand + rng.normal(0, noise, n)
        return build_series(demand, price, temp, dew)

    def test_recovers_demand_feature(self):
        train = self._demand_driven_series(14, seed=10)
        holdout = self._demand_driven_series(7, seed=11, noise=0.1)
        spec, model = forward_select(SYNTHETIC_CANDIDATES, train, holdout, base=("intercept",))
        assert "demand" in spec
        base_model = fit_ols(design_matrix(train, ("intercept",)), price_vector(train), spec=("intercept",))
        base_score = ferms(predict(base_model, design_matrix(holdout, ("intercept",))), price_vector(holdout))
        final_score = ferms(predict(model, design_matrix(holdout, spec)), price_vector(holdout))
        assert final_score <= base_score
        # noise-only regressors stay out on this data
        assert "temperature" not in spec and "dew_point" not in spec

    def test_empty_pool_returns_base(self):
        train = self._demand_driven_series(10, seed=22)
        holdout = self._demand_driven_series(3, seed=23)
        base = ("intercept", "demand")
        spec, model = forward_select(base, train, holdout, base=base)
        assert spec == base
        assert model.spec == base

    def test_numerically_duplicate_candidate_disqualified(self):
        rng = np.random.default_rng(24)
        n = 10 * 24
        demand = rng.uniform(1000, 3000, n)
        temp = rng.uniform(60, 90, n)
        price = 2.0 + 0.5 * temp + rng.normal(0, 0.1, n)
        train = build_series(demand, price, temp, dew=temp)  # dew_point duplicates temperature
        holdout_slice = train[8 * 24 :]
        train_slice = train[: 8 * 24]
        base = ("intercept", "temperature")
        spec, _ = forward_select(
            ("intercept", "temperature", "dew_point"), train_slice, holdout_slice, base=base
        )
        assert spec == base

    def test_base_must_be_subset_of_candidates(self):
        train = self._demand_driven_series(10, seed=25)
        holdout = self._demand_driven_series(3, seed=26)
        with pytest.raises(ValueError):
            forward_select(("intercept", "demand"), train, holdout, base=("intercept", "month"))

    def test_never_worse_than_base(self):
        for seed in range(4):
            series = synthetic_market(21, seed=seed)
            train, holdout = series[: 14 * 24], series[14 * 24 :]
            base = ("intercept",)
            spec, model = forward_select(SYNTHETIC_CANDIDATES, train, holdout, base=base)
            base_model = fit_ols(design_matrix(train, base), price_vector(train), spec=base)
            base_score = ferms(predict(base_model, design_matrix(holdout, base)), price_vector(holdout))
            final_score = ferms(predict(model, design_matrix(holdout, spec)), price_vector(holdout))
            assert final_score <= base_score


class TestModelSerialization:
    def _model(self):
        rng = np.random.default_rng(30)
        X = np.column_stack([np.ones(100), rng.normal(size=(100, 2))])
        y = X @ np.array([2.0, -1.0, 0.002]) + rng.normal(0, 0.5, 100)
        return fit_ols(X, y, spec=("intercept", "a", "b"))

    def test_json_round_trip(self):
        model = self._model()
        doc = model.to_json_dict()
        clone = RegressionModel.from_json_dict(doc)
        assert clone.spec == model.spec
        np.testing.assert_array_equal(clone.coefficients, model.coefficients)
        np.testing.assert_array_equal(clone.std_errors, model.std_errors)
        assert clone.n_obs == model.n_obs

    def test_json_has_significance_markers(self):
        doc = self._model().to_json_dict()
        assert {f["significance"] for f in doc["features"]} <= {"**", "*", "+", ""}
        assert [f["name"] for f in doc["features"]] == ["intercept", "a", "b"]

    def test_table_text_lists_features(self):
        text = self._model().table_text()
        assert "intercept" in text and "t-value" in text
