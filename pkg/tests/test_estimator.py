from fractions import Fraction

import numpy as np
import pytest

from app.models import Valuation
from app.services.learners import EstimatorVariant, GftEstimator
from app.services.learners.gft_estimator import BRANCH_BUYER, BRANCH_SELLER

K = 10
H = Fraction(1, K)


def test_closed_form_mean():
    mean = GftEstimator.closed_form_mean(Fraction(2, 10), K, Fraction(1, 10), Fraction(8, 10))
    assert mean == Fraction(8, 11)
    assert GftEstimator.target_gft(Fraction(2, 10), K, Fraction(1, 10), Fraction(8, 10)) == Fraction(7, 10)


def test_zero_when_the_pair_cannot_trade():
    p = Fraction(2, 10)
    assert GftEstimator.closed_form_mean(p, K, Fraction(4, 10), Fraction(9, 10)) == 0
    assert GftEstimator.closed_form_mean(p, K, Fraction(0), Fraction(1, 10)) == 0


def test_bias_within_two_steps_on_a_lattice():
    ticks = [Fraction(i, 20) for i in range(21)]
    for i in range(K):
        p = Fraction(i, K)
        for s in ticks:
            for b in ticks:
                gap = abs(GftEstimator.closed_form_mean(p, K, s, b) - GftEstimator.target_gft(p, K, s, b))
                assert gap <= 2 * H


def test_literal_variant_is_biased_between_p_and_p_plus_step():
    p, s, b = Fraction(2, 10), Fraction(1, 4), Fraction(1)
    literal = GftEstimator.closed_form_mean(p, K, s, b, EstimatorVariant.LITERAL)
    consistent = GftEstimator.closed_form_mean(p, K, s, b)
    target = GftEstimator.target_gft(p, K, s, b)
    assert literal == Fraction(1, 22)
    assert consistent == Fraction(17, 22)
    assert target - literal > 2 * H
    assert abs(consistent - target) <= 2 * H


def test_posted_pairs_lose_at_most_one_step():
    est = GftEstimator(K)
    u = np.random.default_rng(0).random((10_000, 2))
    for i in range(K):
        sp, bp, seller = est.posted_from_uniforms(i, u[:, 0], u[:, 1])
        assert np.all(sp - bp <= 1.0 / K + 1e-12)
        assert np.all(bp[seller] == i / K)
        assert np.all(bp[~seller] >= i / K)


def test_monte_carlo_mean_matches_closed_form():
    est = GftEstimator(K)
    n = 200_000
    u = np.random.default_rng(42).random((n, 2))
    s, b = 0.1, 0.8
    values = est.sample_values(2, s, b, u[:, 0], u[:, 1])
    mean = float(GftEstimator.closed_form_mean(Fraction(2, 10), K, Fraction(1, 10), Fraction(8, 10)))
    se = np.sqrt(mean * (1 - mean) / n)
    assert abs(values.mean() - mean) <= 5 * se


def test_estimate_is_a_trade_bit(rng):
    est = GftEstimator(4)
    branches = set()
    for _ in range(200):
        result = est.estimate(1, Valuation(0.2, 0.9), rng)
        assert result.value in (0, 1)
        assert result.posted.p - result.posted.q <= 0.25 + 1e-12
        branches.add(result.branch)
    assert branches == {BRANCH_SELLER, BRANCH_BUYER}


def test_variant_from_string():
    assert GftEstimator(4, "literal").variant is EstimatorVariant.LITERAL
    with pytest.raises(ValueError):
        GftEstimator(4, "other")
