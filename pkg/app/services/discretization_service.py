import logging
import math
from typing import Dict, Optional

from app.config import settings
from app.exceptions import ConfigurationError
from app.models.sequence import ValuationSequence
from app.schemas.report import DiscretizationReport
from app.services.benchmark_service import BenchmarkService
from app.services.grid_service import GridService
from app.services.payoff_service import PayoffService

logger = logging.getLogger(__name__)

LOG_BASES = ("e", "2")

# relative tolerance on float revenue totals of H_K pairs
REVENUE_SLACK = 1e-9


def log_factor(x: float, base: Optional[str] = None) -> float:
    """log(x) in the configured base ('e' or '2')"""
    base = base or settings.LOG_BASE
    return math.log2(x) if base == "2" else math.log(x)


class DiscretizationService:
    """Gap between the best fixed price and what the price grids can attain"""

    @staticmethod
    def additive_gap_report(seq: ValuationSequence, K: int) -> DiscretizationReport:
        """max_p sum GFT(p) <= max over H_K of sum GFT + T/K, and every H_K pair loses at most T/K"""
        if len(seq) == 0:
            raise ConfigurationError("Gap reports need a nonempty sequence")
        grid = GridService.adjacent_pairs(K)
        T = len(seq)
        lhs = BenchmarkService.best_fixed_price(seq).value
        best = BenchmarkService.best_pair_on_grid(seq, grid, "gft").value
        rhs = best + T / K

        worst_revenue = min(PayoffService.total_per_pair(seq, grid.p, grid.q, "rev"))
        # a trade on ((i+1)/K, i/K) costs exactly 1/K, so trade counts cross-check the float totals
        trades = ((seq.s[None, :] <= grid.p[:, None]) & (grid.q[:, None] <= seq.b[None, :])).sum(axis=1)
        most = int(trades.max())
        floor = -T / K
        slack = REVENUE_SLACK * T
        consistent = abs(worst_revenue + most / K) <= slack

        report = DiscretizationReport(
            name="additive", K=K, T=T, lhs=lhs, grid_value=best, rhs=rhs,
            slack=rhs - lhs, holds=lhs <= rhs,
            min_pair_revenue=worst_revenue, revenue_floor=floor, max_pair_trades=most,
            revenue_holds=worst_revenue >= floor - slack and consistent,
        )
        if not consistent:
            logger.error("H_K revenue %r disagrees with %d trades at cost 1/%d", worst_revenue, most, K)
        if not (report.holds and report.revenue_holds):
            logger.error("Additive discretization gap violated: %s", report.model_dump())
        return report

    @staticmethod
    def doubled_price_gap_report(seq: ValuationSequence, K: int) -> DiscretizationReport:
        """max_p sum GFT(p) <= 2 max over G_K of sum GFT + T/K"""
        if len(seq) == 0:
            raise ConfigurationError("Gap reports need a nonempty sequence")
        grid = GridService.uniform_grid(K)
        T = len(seq)
        lhs = BenchmarkService.best_fixed_price(seq).value
        best = BenchmarkService.best_pair_on_grid(seq, grid, "gft").value
        rhs = 2.0 * best + T / K
        report = DiscretizationReport(
            name="doubled-price", K=K, T=T, lhs=lhs, grid_value=best, rhs=rhs,
            slack=rhs - lhs, holds=lhs <= rhs,
        )
        if not report.holds:
            logger.error("Doubled-price discretization gap violated: %s", report.model_dump())
        return report

    @staticmethod
    def multiplicative_gap_report(seq: ValuationSequence, K: int, T: Optional[int] = None,
                                  log_base: Optional[str] = None) -> DiscretizationReport:
        """
        max_p sum GFT(p) <= 8 log(T) max over F_K of sum REV + 5T/K

        The verdict is reported for both log bases; rhs and holds follow `log_base`.
        """
        if len(seq) == 0:
            raise ConfigurationError("Gap reports need a nonempty sequence")
        T = len(seq) if T is None else T
        if K > T:
            raise ConfigurationError(f"Multiplicative gap needs K <= T, got K={K}, T={T}")
        base = log_base or settings.LOG_BASE
        if base not in LOG_BASES:
            raise ConfigurationError(f"Unknown log base: {base}")
        grid = GridService.revenue_grid(K, max(T, 2))
        lhs = BenchmarkService.best_fixed_price(seq).value
        best = BenchmarkService.best_pair_on_grid(seq, grid, "rev").value
        rhs_by_base: Dict[str, float] = {
            b: 8.0 * log_factor(T, b) * best + 5.0 * T / K for b in LOG_BASES
        }
        holds_by_base = {b: lhs <= r for b, r in rhs_by_base.items()}
        rhs = rhs_by_base[base]
        report = DiscretizationReport(
            name="multiplicative", K=K, T=T, lhs=lhs, grid_value=best, rhs=rhs,
            slack=rhs - lhs, holds=holds_by_base[base], log_base=base,
            rhs_by_base=rhs_by_base, holds_by_base=holds_by_base,
        )
        if not all(holds_by_base.values()):
            logger.error("Multiplicative discretization gap violated: %s", report.model_dump())
        return report
