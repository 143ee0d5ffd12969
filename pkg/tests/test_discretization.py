import numpy as np
import pytest

from app.exceptions import ConfigurationError
from app.models import ValuationSequence
from app.services.discretization_service import LOG_BASES, DiscretizationService, log_factor
from app.services.grid_service import GridService
from app.services.payoff_service import PayoffService
from app.services.verification_service import random_sequence


def test_log_factor_bases():
    assert log_factor(8, "2") == 3.0
    assert log_factor(np.e, "e") == pytest.approx(1.0)


def test_additive_gap_on_always_trading_rounds():
    seq = ValuationSequence.from_pairs([(0.0, 1.0)] * 10)
    report = DiscretizationService.additive_gap_report(seq, 4)
    assert report.lhs == 10.0
    assert report.grid_value == 10.0
    assert report.rhs == 12.5
    assert report.holds
    assert report.min_pair_revenue == -2.5
    assert report.max_pair_trades == 10
    assert report.revenue_holds


def test_additive_revenue_is_the_worst_pair_total():
    # only the pair (1/2, 1/4) trades on the (0.3, 0.35) rounds
    seq = ValuationSequence.from_pairs([(0.0, 1.0)] * 3 + [(0.3, 0.35)] * 2)
    report = DiscretizationService.additive_gap_report(seq, 4)
    grid = GridService.adjacent_pairs(4)
    assert report.min_pair_revenue == min(PayoffService.total_per_pair(seq, grid.p, grid.q, "rev"))
    assert report.min_pair_revenue == -1.25
    assert report.max_pair_trades == 5
    assert report.revenue_floor == -1.25
    assert report.revenue_holds


def test_additive_revenue_without_trades():
    seq = ValuationSequence.from_pairs([(1.0, 0.0)] * 6)
    report = DiscretizationService.additive_gap_report(seq, 5)
    assert report.min_pair_revenue == 0.0
    assert report.max_pair_trades == 0
    assert report.revenue_holds


def test_additive_revenue_tolerates_float_grid_steps():
    # 0.3 - 0.4 is not exactly -1/10 in binary, so the float total can dip just below -T/K
    seq = ValuationSequence.from_pairs([(0.0, 1.0)] * 30)
    report = DiscretizationService.additive_gap_report(seq, 10)
    assert report.min_pair_revenue == pytest.approx(-3.0)
    assert report.max_pair_trades == 30
    assert report.revenue_holds


def test_multiplicative_gap_reports_both_bases():
    rng = np.random.default_rng(11)
    seq = random_sequence(rng, 64, 4, 0)
    natural = DiscretizationService.multiplicative_gap_report(seq, 4, log_base="e")
    binary = DiscretizationService.multiplicative_gap_report(seq, 4, log_base="2")
    assert set(natural.rhs_by_base) == set(LOG_BASES) == set(natural.holds_by_base)
    assert natural.rhs_by_base == binary.rhs_by_base
    assert natural.rhs == natural.rhs_by_base["e"]
    assert binary.rhs == binary.rhs_by_base["2"]
    assert natural.rhs_by_base["2"] > natural.rhs_by_base["e"]
    assert natural.holds_by_base == {"e": True, "2": True}
    assert binary.holds == binary.holds_by_base["2"]


def test_multiplicative_gap_rejects_unknown_base():
    seq = ValuationSequence.from_pairs([(0.1, 0.9)] * 8)
    with pytest.raises(ConfigurationError):
        DiscretizationService.multiplicative_gap_report(seq, 4, log_base="10")

@pytest.mark.parametrize("kind", [0, 1, 2])
def test_gap_inequalities_hold(kind):
    rng = np.random.default_rng([7, kind])
    for _ in range(5):
        seq = random_sequence(rng, 64, 4, kind)
        assert DiscretizationService.additive_gap_report(seq, 4).holds
        assert DiscretizationService.doubled_price_gap_report(seq, 4).holds
        report = DiscretizationService.multiplicative_gap_report(seq, 4)
        assert report.holds
        assert report.log_base in ("e", "2")


def test_multiplicative_gap_needs_k_at_most_t():
    seq = ValuationSequence.from_pairs([(0.1, 0.9)] * 3)
    with pytest.raises(ConfigurationError):
        DiscretizationService.multiplicative_gap_report(seq, 4)


def test_empty_sequence_rejected():
    seq = ValuationSequence.from_pairs([])
    with pytest.raises(ConfigurationError):
        DiscretizationService.additive_gap_report(seq, 4)
