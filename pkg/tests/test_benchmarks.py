from fractions import Fraction

import numpy as np
import pytest

from app.exceptions import ConfigurationError
from app.models import ValuationSequence
from app.services.adversary_service import AdversaryService
from app.services.benchmark_service import BenchmarkService
from app.services.gftmax_service import GftMaxService
from app.schemas.simulation import GftMaxConfig
from app.services.grid_service import GridService
from app.services.verification_service import random_sequence


def test_best_fixed_price_prefers_smallest_tie(two_rounds):
    result = BenchmarkService.best_fixed_price(two_rounds)
    assert result.price == 0.5
    assert result.value == pytest.approx(0.8)
    assert BenchmarkService.fixed_price_value(two_rounds, 0.55) == result.value


def test_best_fixed_price_matches_brute_force(rng):
    for _ in range(20):
        seq = random_sequence(rng, 30, 10, int(rng.integers(3)))
        best = BenchmarkService.best_fixed_price(seq)
        brute = max(BenchmarkService.fixed_price_value(seq, p) for p in BenchmarkService.candidate_prices(seq))
        assert best.value == brute


def test_rounds_with_seller_above_buyer_are_ignored():
    seq = ValuationSequence.from_pairs([(0.7, 0.3)])
    result = BenchmarkService.best_fixed_price(seq)
    assert (result.price, result.value) == (0.0, 0.0)
    report = BenchmarkService.hindsight_report(seq)
    assert report.ratio == "undefined"
    assert report.best_distribution.value == 0.0


def test_best_pair_on_grid_tie_break():
    seq = ValuationSequence.from_pairs([(0.0, 1.0)])
    result = BenchmarkService.best_pair_on_grid(seq, GridService.uniform_grid(2))
    assert (result.pair.p, result.pair.q) == (0.0, 0.0)
    assert result.value == 1.0


def test_gap_sequence_nearly_doubles_the_benchmark():
    seq = AdversaryService.benchmark_gap_sequence(0.05, 200)
    report = BenchmarkService.hindsight_report(seq)
    assert report.best_fixed_price.value == pytest.approx(45.0)
    assert report.ratio >= 2 - 8 * 0.05
    assert report.ratio <= 2.0
    dist = report.best_distribution
    assert dist.expected_revenue >= 0.0
    assert sum(Fraction(w) for w in dist.weights_exact) == 1


def test_hull_search_matches_pairwise_oracle(rng):
    for n in range(40):
        seq = random_sequence(rng, int(rng.integers(1, 10)), 4, n)
        hull = BenchmarkService.best_feasible_distribution(seq)
        brute = BenchmarkService.best_feasible_distribution_bruteforce(seq)
        assert hull.value == pytest.approx(brute.value, abs=1e-9)
        assert hull.expected_revenue >= 0.0


def test_distribution_ratio_between_one_and_two(rng):
    for n in range(30):
        seq = random_sequence(rng, 50, 10, n)
        report = BenchmarkService.hindsight_report(seq)
        if report.ratio != "undefined":
            assert 1.0 - 1e-9 <= report.ratio <= 2.0 + 1e-9


def test_partial_reports():
    seq = ValuationSequence.from_pairs([(0.1, 0.9)])
    assert BenchmarkService.hindsight_report(seq, "fixed").best_distribution is None
    assert BenchmarkService.hindsight_report(seq, "distribution").best_fixed_price is None
    with pytest.raises(ConfigurationError):
        BenchmarkService.hindsight_report(seq, "other")
    with pytest.raises(ConfigurationError):
        BenchmarkService.best_fixed_price(ValuationSequence.from_pairs([]))


def test_regret_against_both_benchmarks():
    seq = AdversaryService.uniform_sequence(100, np.random.default_rng(4))
    trace, summary = GftMaxService.simulate(GftMaxConfig.preset("full", 100, seed=4), seq)
    assert BenchmarkService.regret(seq, trace) == pytest.approx(summary.regret)
    assert BenchmarkService.regret(seq, trace, "distribution", alpha=0.5) >= summary.regret - 1e-9
    with pytest.raises(ConfigurationError):
        BenchmarkService.regret(seq, trace, "other")
    with pytest.raises(ConfigurationError):
        BenchmarkService.regret(ValuationSequence.from_pairs([(0.1, 0.2)]), trace)
