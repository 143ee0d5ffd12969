import math

import numpy as np
import pytest

from app.exceptions import ConfigurationError, RewardRangeError
from app.services.learners import ActionDistribution, Exp3P, Hedge
from app.services.learners.hedge import rescale


def test_action_distribution_sampling():
    rng = np.random.default_rng(0)
    dist = ActionDistribution(np.array([0.0, 1.0, 0.0]))
    assert {dist.sample(rng) for _ in range(50)} == {1}


def test_rescale_maps_range_and_rejects_outliers():
    assert rescale(np.array([-0.25, 1.0]), -0.25, 1.0).tolist() == [0.0, 1.0]
    with pytest.raises(RewardRangeError):
        rescale(np.array([1.5]), 0.0, 1.0)
    with pytest.raises(RewardRangeError):
        rescale(np.array([np.nan]), 0.0, 1.0)


class TestHedge:
    def test_starts_uniform(self):
        hedge = Hedge(4, 100)
        assert np.allclose(hedge.recommend().probs, 0.25)
        assert hedge.eta == pytest.approx(np.sqrt(np.log(4) / 100))

    def test_moves_toward_best_action(self):
        hedge = Hedge(3, 100)
        for _ in range(50):
            hedge.update([1.0, 0.5, 0.0])
        probs = hedge.recommend().probs
        assert probs[0] > probs[1] > probs[2]
        assert probs.sum() == pytest.approx(1.0)

    def test_survives_long_horizons(self):
        hedge = Hedge(2, 10, eta=1.0)
        for _ in range(5000):
            hedge.update([1.0, 0.0])
        probs = hedge.recommend().probs
        assert np.all(np.isfinite(probs))
        assert probs[0] == pytest.approx(1.0)

    @pytest.mark.parametrize("T", [100, 1000, 10_000])
    def test_regret_on_two_arm_stream(self, T):
        hedge = Hedge(2, T)
        regret = 0.0
        for _ in range(T):
            # arm 0 pays 1, arm 1 pays 0, so every unit of mass on arm 1 is lost
            regret += hedge.recommend().probs[1]
            hedge.update([1.0, 0.0])
        assert regret <= 2.0 * math.sqrt(T * math.log(2))

    @pytest.mark.slow
    def test_stays_a_distribution_over_a_million_updates(self):
        T = 1_000_000
        rng = np.random.default_rng(5)
        hedge = Hedge(2, T)
        rewards = rng.random((T, 2))
        rewards[:, 0] = np.minimum(1.0, rewards[:, 0] + 0.1)
        for row in rewards:
            hedge.update(row)
        probs = hedge.recommend().probs
        assert hedge.updates == T
        assert np.all(np.isfinite(probs)) and np.all(probs >= 0.0)
        assert probs.sum() == pytest.approx(1.0)
        assert probs[0] > 0.99

    def test_declared_range(self):
        hedge = Hedge(2, 10, reward_range=(-0.25, 1.0))
        hedge.update([-0.25, 1.0])
        with pytest.raises(RewardRangeError):
            hedge.update([-0.5, 0.0])

    def test_invalid_arguments(self):
        with pytest.raises(ConfigurationError):
            Hedge(0, 10)
        with pytest.raises(ConfigurationError):
            Hedge(2, 10, reward_range=(1.0, 1.0))
        with pytest.raises(ConfigurationError):
            Hedge(2, 10).update([0.5])


class TestExp3P:
    def test_default_parameters(self):
        bandit = Exp3P(5, 1000)
        assert bandit.delta == pytest.approx(1e-3)
        assert 0.0 < bandit.gamma <= 0.6
        probs = bandit.probabilities()
        assert probs.sum() == pytest.approx(1.0)
        assert probs.min() >= bandit.gamma / 5 - 1e-12

    def test_learns_the_rewarding_arm(self):
        rng = np.random.default_rng(3)
        bandit = Exp3P(3, 2000)
        for _ in range(2000):
            a = bandit.sample(rng)
            bandit.update(a, 1.0 if a == 0 else 0.0)
        probs = bandit.probabilities()
        assert probs[0] > probs[1] and probs[0] > probs[2]

    def test_rejects_bad_updates(self):
        bandit = Exp3P(3, 10)
        with pytest.raises(ConfigurationError):
            bandit.update(3, 0.5)
        with pytest.raises(RewardRangeError):
            bandit.update(0, 2.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(20))
    def test_revenue_regret_within_high_probability_bound(self, seed):
        T = 10_000
        rng = np.random.default_rng([17, seed])
        rewards = (rng.random((T, 2)) < np.array([0.9, 0.1])).astype(float)
        bandit = Exp3P(2, T)
        collected = 0.0
        for row in rewards:
            a = bandit.sample(rng)
            collected += row[a]
            bandit.update(a, row[a])
        regret = rewards.sum(axis=0).max() - collected
        assert regret <= 32.0 * math.sqrt(2 * T * math.log(2 * T))
        assert regret <= 0.1 * T
        assert collected / T > 0.7
