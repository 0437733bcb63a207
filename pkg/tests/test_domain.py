import numpy as np
import pytest

from tagaudit.domain import (
    CampaignAggregate,
    PredictiveValues,
    QualityReport,
    Tag,
    validate_aggregate,
)
from tagaudit.errors import CountsExceedPopulation, NegativeCount, ZeroPopulation


def test_tag_values_are_exclusive():
    assert len({t.value for t in Tag}) == 3


class TestPredictiveValues:
    def test_rows_must_sum_to_one(self):
        with pytest.raises(ValueError):
            PredictiveValues((0.5, 0.4, 0.2), (0.2, 0.7, 0.1), (0.4, 0.5, 0.1))

    def test_entries_must_be_probabilities(self):
        with pytest.raises(ValueError):
            PredictiveValues((1.2, -0.3, 0.1), (0.2, 0.7, 0.1), (0.4, 0.5, 0.1))

    def test_solver_scale_noise_is_accepted(self):
        eps = 5e-10
        pv = PredictiveValues((0.8 + eps, 0.15, 0.05 - eps), (0.2, 0.7, 0.1), (0.4, 0.5, 0.1))
        assert pv.alpha[0] == pytest.approx(0.8, abs=1e-9)

    def test_array_round_trip(self):
        pv = PredictiveValues((0.8, 0.15, 0.05), (0.2, 0.7, 0.1), (0.4, 0.5, 0.1))
        assert PredictiveValues.from_array(pv.as_array()) == pv

    def test_row_lookup_and_precision(self):
        pv = PredictiveValues((0.8, 0.15, 0.05), (0.2, 0.7, 0.1), (0.4, 0.5, 0.1))
        assert pv.row_for(Tag.POSITIVE) == pv.alpha
        assert pv.row_for(Tag.UNKNOWN) == pv.gamma
        assert pv.precision == 0.8

    def test_unbiasedness_flag(self):
        pv = PredictiveValues((0.8, 0.15, 0.05), (0.2, 0.7, 0.1), (0.4, 0.5, 0.1))
        assert pv.is_unbiased(0.1)
        assert not pv.is_unbiased(0.05)


class TestValidateAggregate:
    def test_completion_to_population(self):
        agg = validate_aggregate(
            {"campaign_id": "c1", "population": 100, "d_plus": 60, "d_minus": 20,
             "g_plus": 70, "g_minus": 30}
        )
        assert agg.d_unknown == 20
        assert agg.g_unknown == 0

    def test_counts_exceeding_population(self):
        with pytest.raises(CountsExceedPopulation):
            validate_aggregate(
                {"campaign_id": "c1", "population": 100, "d_plus": 60, "d_minus": 50,
                 "g_plus": 70, "g_minus": 30}
            )

    def test_zero_population(self):
        with pytest.raises(ZeroPopulation):
            validate_aggregate(
                {"campaign_id": "c1", "population": 0, "d_plus": 0, "d_minus": 0,
                 "g_plus": 0, "g_minus": 0}
            )

    def test_negative_count(self):
        with pytest.raises(NegativeCount):
            validate_aggregate(
                {"campaign_id": "c1", "population": 100, "d_plus": -1, "d_minus": 50,
                 "g_plus": 70, "g_minus": 30}
            )

    def test_idempotent(self):
        agg = validate_aggregate(
            {"campaign_id": "c1", "population": 100, "d_plus": 60, "d_minus": 20,
             "g_plus": 70, "g_minus": 30}
        )
        assert validate_aggregate(agg) == agg

    def test_float_dust_at_population_boundary(self):
        agg = validate_aggregate(
            {"campaign_id": "c1", "population": 100.0, "d_plus": 60.0,
             "d_minus": 40.0 + 1e-13, "g_plus": 70.0, "g_minus": 30.0}
        )
        assert agg.d_unknown == 0
        assert agg.g_unknown == 0

    def test_triples_sum_to_population_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            m = int(rng.integers(1, 10_000))
            dp = int(rng.integers(0, m + 1))
            dm = int(rng.integers(0, m - dp + 1))
            gp = int(rng.integers(0, m + 1))
            gm = int(rng.integers(0, m - gp + 1))
            agg = validate_aggregate(
                {"campaign_id": "r", "population": m, "d_plus": dp, "d_minus": dm,
                 "g_plus": gp, "g_minus": gm}
            )
            assert agg.d_plus + agg.d_minus + agg.d_unknown == m
            assert agg.g_plus + agg.g_minus + agg.g_unknown == m


class TestCampaignAggregate:
    def test_inconsistent_triple_rejected(self):
        with pytest.raises(ValueError):
            CampaignAggregate("c", 100, 60, 20, 30, 70, 30, 0)

    def test_fraction_helpers(self):
        agg = CampaignAggregate("c", 100, 60, 20, 20, 70, 30, 0)
        assert np.allclose(agg.d_fractions(), [0.6, 0.2, 0.2])
        assert np.allclose(agg.g_counts(), [70, 30, 0])


class TestQualityReport:
    def _values(self):
        return PredictiveValues((0.8, 0.15, 0.05), (0.2, 0.7, 0.1), (0.4, 0.5, 0.1))

    def test_intervals_unavailable_below_four_campaigns(self):
        with pytest.raises(ValueError):
            QualityReport("s", 0.1, self._values(), tuple([0.1] * 9), 0.95, 3)

    def test_three_campaign_report_without_intervals(self):
        report = QualityReport("s", 0.1, self._values(), None, 0.95, 3)
        assert report.ci_half_widths is None

    def test_inference_needs_three_campaigns(self):
        with pytest.raises(ValueError):
            QualityReport("s", 0.1, self._values(), None, 0.95, 2)
