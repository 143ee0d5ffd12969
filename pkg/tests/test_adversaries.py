from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from app.exceptions import ConfigurationError
from app.schemas.adversary import DistributionSpec, ValuationPoint
from app.services.adversary_service import AdversaryService, exact_totals


def test_exact_totals():
    points = [(Fraction(0), Fraction(1, 2), 3), (Fraction(1, 2), Fraction(1), 1)]
    assert exact_totals(points, Fraction(1, 2), Fraction(1, 2)) == (Fraction(2), Fraction(0))
    assert exact_totals(points, Fraction(0), Fraction(1, 4)) == (Fraction(3, 2), Fraction(3, 4))


def test_distribution_from_spec(rng):
    spec = DistributionSpec(support=[ValuationPoint(s=0.1, b=0.9), ValuationPoint(s=0.4, b=0.6)], probs=[0.25, 0.75])
    dist = AdversaryService.distribution_from_spec(spec)
    seq = AdversaryService.iid_sequence(dist, 500, rng)
    assert len(seq) == 500
    assert set(seq.s.tolist()) <= {0.1, 0.4}
    with pytest.raises(ConfigurationError):
        AdversaryService.distribution_from_spec(DistributionSpec(support=[ValuationPoint(s=0, b=1)], probs=[0.5, 0.5]))
    with pytest.raises(ConfigurationError):
        AdversaryService.distribution_from_spec(DistributionSpec(support=[ValuationPoint(s=0, b=1)], probs=[0.5]))


@pytest.mark.parametrize("support, probs", [
    ([(0.1, 0.9), (0.4, 0.6), (0.7, 0.2)], [0.2, 0.5, 0.3]),
    ([(0.0, 1.0), (0.5, 0.5), (0.25, 0.75), (0.9, 0.95)], [0.1, 0.1, 0.4, 0.4]),
])
def test_iid_sequence_frequencies(support, probs):
    T = 100_000
    spec = DistributionSpec(support=[ValuationPoint(s=s, b=b) for s, b in support], probs=probs)
    seq = AdversaryService.iid_sequence(AdversaryService.distribution_from_spec(spec), T, np.random.default_rng(31))
    pairs = seq.as_pairs()
    observed = np.array([pairs.count(point) for point in support])
    assert observed.sum() == T

    expected = T * np.asarray(probs)
    assert stats.chisquare(observed, expected).pvalue > 1e-3
    sigma = np.sqrt(expected * (1 - np.asarray(probs)))
    assert np.all(np.abs(observed - expected) <= 4 * sigma)


def test_full_lb_sequence_frequencies():
    T = 100_000
    dist = AdversaryService.full_lb_distribution()
    seq = AdversaryService.iid_sequence(dist, T, np.random.default_rng(32))
    pairs = seq.as_pairs()
    observed = [pairs.count((s, b)) for s, b in zip(dist.s.tolist(), dist.b.tolist())]
    assert sum(observed) == T
    assert stats.chisquare(observed, [T / 3] * 3).pvalue > 1e-3

def test_full_lb_distribution():
    dist = AdversaryService.full_lb_distribution()
    assert dist.labels == ("A", "B", "C")
    assert all(m == Fraction(1, 3) for _, _, m in dist.exact)
    assert dist.s.tolist() == [0.0, 0.75, 0.75]


def test_full_lb_case_table():
    table = AdversaryService.full_lb_case_table(probe=24)
    assert len(table.cases) == 4
    assert all(case.matches for case in table.cases)
    assert Fraction(table.probe_max) == Fraction(1, 12)
    assert table.probe_size == 25 ** 2


@pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 1.0), (2, 1.0), (3, 1.5), (4, 1.5)])
def test_random_walk_mean_abs(n, expected):
    assert AdversaryService.random_walk_mean_abs(n) == pytest.approx(expected)


def test_random_walk_lower_bound():
    for n in (1, 10, 100, 1000):
        assert AdversaryService.random_walk_mean_abs(n) >= 2 / 3 * np.sqrt(n)


def test_full_lb_best_price_estimate():
    check = AdversaryService.full_lb_best_price_estimate(400, 2000, np.random.default_rng(8))
    assert check.passed
    assert check.target == pytest.approx(400 / 12 + 5 * 20 / 216)
    with pytest.raises(ConfigurationError):
        AdversaryService.full_lb_best_price_estimate(10, 1, np.random.default_rng(0))


def test_gap_sequence_alternates():
    seq = AdversaryService.benchmark_gap_sequence(0.05, 6)
    assert seq.s.tolist() == [0.0, 0.55, 0.0, 0.55, 0.0, 0.55]
    assert seq.b.tolist() == [0.45, 1.0, 0.45, 1.0, 0.45, 1.0]
    with pytest.raises(ConfigurationError):
        AdversaryService.benchmark_gap_sequence(0.05, 7)
    with pytest.raises(ConfigurationError):
        AdversaryService.benchmark_gap_sequence(0.125, 8)


def test_gap_mixture_is_exactly_revenue_neutral():
    report = AdversaryService.gap_mixture(0.05, 200)
    assert report.alpha == "9/13"
    assert report.expected_revenue == "0"
    assert Fraction(report.expected_gft) == Fraction(990, 13)
    assert report.fixed_price_value == "45"
    assert report.holds


def test_alpha_lb_sequences(rng):
    pair = AdversaryService.alpha_lb_sequences(100, rng)
    assert len(pair.s1) == len(pair.s2) == 100
    assert np.array_equal(pair.s1.s[:50], pair.s2.s[:50])
    assert np.all(pair.s1.s[50:] == 0.0) and np.all(pair.s1.b[50:] == 0.0)
    top_s, top_b = pair.most_frequent
    assert np.all(pair.s2.s[50:] == float(top_s)) and np.all(pair.s2.b[50:] == float(top_b))
    assert pair.low_count == int(np.sum(pair.s1.s[:50] == 0.0))
    if pair.low_count * 2 == 50:
        assert pair.most_frequent == (Fraction(0), Fraction(1, 3))
    with pytest.raises(ConfigurationError):
        AdversaryService.alpha_lb_sequences(10, rng)


def test_alpha_reference_mixture_guarantee():
    for seed in range(5):
        pair = AdversaryService.alpha_lb_sequences(100, np.random.default_rng(seed))
        ref = AdversaryService.alpha_reference_mixture(100, pair)
        assert ref.holds
        assert Fraction(ref.expected_gft) >= Fraction(200, 7)
        assert Fraction(ref.expected_revenue) >= 0


def test_alpha_lb_report():
    report = AdversaryService.alpha_lb_report(40, np.random.default_rng(1), "full")
    assert [run.name for run in report.runs] == ["S1", "S2"]
    assert all(run.summary.T == 40 for run in report.runs)
    assert report.reference.holds
