import numpy as np
import pytest

from tagaudit.domain import PredictiveValues, Tag
from tagaudit.errors import EmptySample, InvalidSplit
from tagaudit.experiments import HIGH_QUALITY
from tagaudit.simulate import (
    AudienceSample,
    SplitSpec,
    aggregate,
    expected_aggregate,
    gen_campaign,
    gen_campaign_from_counts,
    oracle_metric,
    perturb_profile,
)

IDENTITY = PredictiveValues((1, 0, 0), (0, 1, 0), (0, 0, 1))
P, N, U = Tag.POSITIVE, Tag.NEGATIVE, Tag.UNKNOWN


class TestSplitSpec:
    def test_total(self):
        assert SplitSpec(20, 40).total == 100

    def test_negative_counts_rejected(self):
        with pytest.raises(InvalidSplit):
            SplitSpec(-1, 40)
        with pytest.raises(InvalidSplit):
            SplitSpec(20, -4)

    def test_empty_audience_rejected(self):
        with pytest.raises(InvalidSplit):
            SplitSpec(0, 0)


class TestGenCampaign:
    def test_audience_size_matches_split(self):
        sample = gen_campaign(HIGH_QUALITY, SplitSpec(20, 40), seed=11)
        assert len(sample) == 100

    def test_deterministic_in_seed(self):
        split = SplitSpec(20, 40)
        a = gen_campaign(HIGH_QUALITY, split, seed=123)
        b = gen_campaign(HIGH_QUALITY, split, seed=123)
        c = gen_campaign(HIGH_QUALITY, split, seed=124)
        assert a == b
        assert a != c

    def test_identity_profile_truth_equals_prediction(self):
        sample = gen_campaign(IDENTITY, SplitSpec(10, 7), seed=5)
        assert np.array_equal(sample.predicted, sample.truth)

    def test_law_of_large_numbers_precision(self):
        # One million users; among those predicted Positive the truth is
        # Positive with probability alpha1 = 0.8.
        sample = gen_campaign(HIGH_QUALITY, SplitSpec(333333, 1), seed=2024)
        mask = sample.predicted == 0
        frac = float(np.mean(sample.truth[mask] == 0))
        assert frac == pytest.approx(0.8, abs=0.002)

    def test_explicit_counts_variant(self):
        sample = gen_campaign_from_counts(HIGH_QUALITY, (70, 20, 10), seed=3)
        assert len(sample) == 100
        assert int(np.sum(sample.predicted == 0)) == 70
        with pytest.raises(InvalidSplit):
            gen_campaign_from_counts(HIGH_QUALITY, (0, 0, 0), seed=3)


class TestPerturbProfile:
    def test_zero_noise_is_identity(self):
        assert perturb_profile(HIGH_QUALITY, 0.0, seed=9) == HIGH_QUALITY

    def test_output_is_valid_at_max_noise(self):
        for seed in range(50):
            perturbed = perturb_profile(HIGH_QUALITY, 0.35, seed=seed)
            rows = perturbed.as_array()
            assert np.all(rows >= 0) and np.all(rows <= 1)
            assert np.allclose(rows.sum(axis=1), 1.0)

    def test_deterministic_in_seed(self):
        assert perturb_profile(HIGH_QUALITY, 0.2, 7) == perturb_profile(HIGH_QUALITY, 0.2, 7)
        assert perturb_profile(HIGH_QUALITY, 0.2, 7) != perturb_profile(HIGH_QUALITY, 0.2, 8)

    def test_mean_preserved_over_seeds(self):
        vals = [perturb_profile(HIGH_QUALITY, 0.15, seed).alpha[0] for seed in range(1000)]
        assert float(np.mean(vals)) == pytest.approx(0.8, abs=0.02)

    def test_zeta_out_of_range(self):
        with pytest.raises(ValueError):
            perturb_profile(HIGH_QUALITY, 0.5, seed=1)


class TestAggregate:
    def test_direct_counting(self):
        sample = AudienceSample.from_pairs([(P, P), (P, N), (N, N), (U, U)])
        agg = aggregate(sample, "c0")
        assert (agg.d_plus, agg.d_minus, agg.d_unknown) == (2, 1, 1)
        assert (agg.g_plus, agg.g_minus, agg.g_unknown) == (1, 2, 1)
        assert agg.population == 4

    def test_identity_profile_sides_agree(self):
        sample = gen_campaign(IDENTITY, SplitSpec(5, 10), seed=1)
        agg = aggregate(sample, "c0")
        assert agg.d_counts().tolist() == agg.g_counts().tolist()

    def test_both_sides_sum_to_audience(self):
        sample = gen_campaign(HIGH_QUALITY, SplitSpec(20, 40), seed=17)
        agg = aggregate(sample, "c0")
        assert agg.d_counts().sum() == 100
        assert agg.g_counts().sum() == 100

    def test_empty_sample(self):
        empty = AudienceSample.from_pairs([])
        with pytest.raises(EmptySample):
            aggregate(empty, "c0")


class TestExpectedAggregate:
    def test_direct_evaluation(self):
        agg = expected_aggregate(HIGH_QUALITY, (40, 30, 30), "c0")
        assert agg.g_plus == pytest.approx(50.0, abs=1e-12)

    def test_identity_profile(self):
        agg = expected_aggregate(IDENTITY, (11, 22, 33), "c0")
        assert agg.g_counts().tolist() == [11, 22, 33]

    def test_uniform_rows_symmetric_design(self):
        third = (1 / 3, 1 / 3, 1 / 3)
        uniform = PredictiveValues(third, third, third)
        agg = expected_aggregate(uniform, (30, 30, 30), "c0")
        assert np.allclose(agg.g_counts(), [30, 30, 30])

    def test_sampled_fractions_converge_to_expectation(self):
        # 3-sigma binomial agreement between the sampled and expected G side.
        n = 100_000
        sample = gen_campaign(HIGH_QUALITY, SplitSpec(n // 5, 2 * n // 5), seed=99)
        observed = aggregate(sample, "c").g_fractions()
        d = aggregate(sample, "c").d_counts()
        expect = expected_aggregate(HIGH_QUALITY, d, "c").g_fractions()
        bound = 3 * np.sqrt(expect * (1 - expect) / n)
        assert np.all(np.abs(observed - expect) <= bound)


class TestOracleMetric:
    def test_identity_sample_is_perfectly_accurate(self):
        sample = gen_campaign(IDENTITY, SplitSpec(4, 10), seed=2)
        assert oracle_metric(sample, "accuracy") == 1.0

    def test_hand_counted_sample(self):
        sample = AudienceSample.from_pairs([(P, P), (P, N), (N, N), (U, U)])
        assert oracle_metric(sample, "accuracy") == pytest.approx(0.75)
        assert oracle_metric(sample, "true_positive_rate") == pytest.approx(0.25)

    def test_all_unknown_predictions_have_zero_tpr(self):
        sample = AudienceSample.from_pairs([(U, P), (U, N), (U, U)])
        assert oracle_metric(sample, "true_positive_rate") == 0.0

    def test_empty_sample(self):
        with pytest.raises(EmptySample):
            oracle_metric(AudienceSample.from_pairs([]), "accuracy")

    def test_unknown_metric_name(self):
        sample = AudienceSample.from_pairs([(P, P)])
        with pytest.raises(ValueError):
            oracle_metric(sample, "f1")
