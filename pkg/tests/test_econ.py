import math

import numpy as np
import pytest
from scipy.stats import norm

from tagaudit.econ import (
    PrecisionTable,
    brute_force_precision,
    forecast_category,
    max_data_cpi,
    normal_quantile,
    plan_sample_size,
    required_impressions,
    total_evaluation_cost,
)
from tagaudit.errors import (
    CountExceedsReach,
    InvalidParameters,
    UnknownTag,
    ZeroFreePrecision,
    ZeroReach,
)


class TestNormalQuantile:
    def test_against_scipy(self):
        # scipy is the independent oracle for the rational approximation.
        for p in np.concatenate(
            [np.geomspace(1e-300, 0.5, 4001), 1 - np.geomspace(1e-16, 0.5, 4001)]
        ):
            assert normal_quantile(float(p)) == pytest.approx(
                float(norm.ppf(p)), abs=1e-8, rel=1e-9
            )

    def test_symmetry(self):
        for p in (0.01, 0.1, 0.3, 0.49):
            assert normal_quantile(p) == pytest.approx(-normal_quantile(1 - p), abs=1e-12)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.2, 1.7):
            with pytest.raises(InvalidParameters):
                normal_quantile(bad)


class TestRequiredImpressions:
    def test_two_categories(self):
        assert required_impressions(2) == 1051

    def test_ten_categories(self):
        assert required_impressions(10) == 379

    def test_derived_constant(self):
        z = normal_quantile(1 - 0.05 / 2) + normal_quantile(0.90)
        assert (z / 0.05) ** 2 == pytest.approx(4202.969, abs=0.01)

    def test_matches_closed_form_for_all_small_c(self):
        for c in range(2, 101):
            assert required_impressions(c) == math.ceil(4202.969 * (1 / c) * (1 - 1 / c))

    def test_strictly_decreasing_in_categories(self):
        values = [required_impressions(c) for c in range(2, 30)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert required_impressions(2) > required_impressions(3)

    def test_invalid_parameters(self):
        with pytest.raises(InvalidParameters):
            required_impressions(1)
        with pytest.raises(InvalidParameters):
            required_impressions(2, margin=0.0)
        with pytest.raises(InvalidParameters):
            required_impressions(2, power=1.0)

    def test_plan_wrapper(self):
        plan = plan_sample_size(2)
        assert plan.required_impressions == 1051
        assert plan.margin == 0.05


class TestTotalEvaluationCost:
    def test_single_source(self):
        assert total_evaluation_cost(1, 2, 0.001) == pytest.approx(1.051)

    def test_fleet_scale(self):
        assert total_evaluation_cost(200_000, 2, 0.001) == pytest.approx(210_200.0)

    def test_zero_sources_rejected(self):
        with pytest.raises(InvalidParameters):
            total_evaluation_cost(0, 2, 0.001)


class TestMaxDataCpi:
    def test_positive_lift(self):
        assert max_data_cpi(1.0, 0.6, 0.4) == pytest.approx(0.5)

    def test_no_lift_no_budget(self):
        assert max_data_cpi(2.0, 0.4, 0.4) == pytest.approx(0.0)

    def test_negative_threshold_means_not_worth_buying(self):
        assert max_data_cpi(1.0, 0.3, 0.4) == pytest.approx(-0.25)

    def test_homogeneous_in_cpi(self):
        assert max_data_cpi(2.0, 0.6, 0.4) == pytest.approx(2 * max_data_cpi(1.0, 0.6, 0.4))

    def test_zero_free_precision(self):
        with pytest.raises(ZeroFreePrecision):
            max_data_cpi(1.0, 0.5, 0.0)


class TestBruteForcePrecision:
    def test_reported_reading(self):
        assert brute_force_precision(345, 1000) == pytest.approx(0.345)

    def test_bounds(self):
        assert brute_force_precision(0, 50) == 0.0
        assert brute_force_precision(50, 50) == 1.0

    def test_zero_reach(self):
        with pytest.raises(ZeroReach):
            brute_force_precision(10, 0)

    def test_count_exceeds_reach(self):
        with pytest.raises(CountExceedsReach):
            brute_force_precision(60, 50)


class TestForecastCategory:
    def test_all_certain_single_tags(self):
        table = PrecisionTable({"a": 1.0})
        assert forecast_category([("a",)] * 7, table) == pytest.approx(7.0)

    def test_hand_computed_mean_combiner(self):
        table = PrecisionTable({"a": 0.4, "b": 0.8})
        users = [("a",), ("a", "b")]
        assert forecast_category(users, table, "mean") == pytest.approx(1.0)

    def test_empty_population(self):
        assert forecast_category([], PrecisionTable({"a": 0.5})) == 0.0

    def test_untagged_users_contribute_nothing(self):
        table = PrecisionTable({"a": 0.9})
        assert forecast_category([(), ("a",), ()], table) == pytest.approx(0.9)

    def test_combiners(self):
        table = PrecisionTable({"a": 0.2, "b": 0.8, "c": 0.5})
        users = [("a", "b", "c")]
        assert forecast_category(users, table, "max") == pytest.approx(0.8)
        assert forecast_category(users, table, "min") == pytest.approx(0.2)
        assert forecast_category(users, table, "median") == pytest.approx(0.5)
        with pytest.raises(InvalidParameters):
            forecast_category(users, table, "geometric")

    def test_unknown_tag(self):
        with pytest.raises(UnknownTag):
            forecast_category([("mystery",)], PrecisionTable({"a": 0.5}))

    def test_monotone_in_table_and_bounded(self):
        rng = np.random.default_rng(4)
        users = [tuple(rng.choice(["a", "b", "c"], size=rng.integers(0, 4), replace=False))
                 for _ in range(40)]
        lo = PrecisionTable({"a": 0.2, "b": 0.3, "c": 0.1})
        hi = PrecisionTable({"a": 0.4, "b": 0.6, "c": 0.2})
        for combiner in ("max", "min", "mean", "median"):
            f_lo = forecast_category(users, lo, combiner)
            f_hi = forecast_category(users, hi, combiner)
            assert 0.0 <= f_lo <= len(users)
            assert f_lo <= f_hi

    def test_matches_simulated_truth_within_three_sigma(self):
        # Users with one tag each; truth sampled per user from the table.
        rng = np.random.default_rng(8)
        table = PrecisionTable({"a": 0.7, "b": 0.25, "c": 0.5})
        tags = rng.choice(["a", "b", "c"], size=5000)
        probs = np.array([table[t] for t in tags])
        true_count = int(np.sum(rng.random(len(tags)) < probs))
        forecast = forecast_category([(t,) for t in tags], table)
        sigma = float(np.sqrt(np.sum(probs * (1 - probs))))
        assert abs(true_count - forecast) <= 3 * sigma

    def test_table_validation(self):
        with pytest.raises(InvalidParameters):
            PrecisionTable({"a": 1.4})
