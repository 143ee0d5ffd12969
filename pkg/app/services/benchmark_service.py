import logging
import math
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from app.exceptions import ConfigurationError
from app.models import PriceGrid, PricePair, RunTrace
from app.models.sequence import ValuationSequence
from app.schemas.benchmark import (
    FixedPriceResult,
    GridPairResult,
    HindsightReport,
    MixedPriceStrategy,
    PriceQuote,
)
from app.services.payoff_service import PayoffService

logger = logging.getLogger(__name__)


class _GridCloud:
    """Total GFT f and total revenue g at every point of the valuation grid"""

    def __init__(self, seq: ValuationSequence):
        s, b = seq.s, seq.b
        self.sv = np.unique(np.concatenate(([0.0, 1.0], s)))
        self.bv = np.unique(np.concatenate(([0.0, 1.0], b)))
        si = np.searchsorted(self.sv, s)
        bi = np.searchsorted(self.bv, b)
        shape = (self.sv.size, self.bv.size)
        w = np.zeros(shape)
        c = np.zeros(shape)
        np.add.at(w, (si, bi), b - s)
        np.add.at(c, (si, bi), 1.0)
        # dominance sums: rounds with s <= p (rows up to i) and b >= q (columns from j)
        w = np.cumsum(w, axis=0)[:, ::-1].cumsum(axis=1)[:, ::-1]
        c = np.cumsum(c, axis=0)[:, ::-1].cumsum(axis=1)[:, ::-1]
        self.f = w.ravel()
        self.g = ((self.bv[None, :] - self.sv[:, None]) * c).ravel()
        self.n_cols = self.bv.size

    def pair(self, flat_index: int) -> PricePair:
        i, j = divmod(int(flat_index), self.n_cols)
        return PricePair(float(self.sv[i]), float(self.bv[j]))


class BenchmarkService:
    """Hindsight oracles: best fixed price, best grid pair, best budget-feasible distribution"""

    @staticmethod
    def _require_nonempty(seq: ValuationSequence) -> None:
        if len(seq) == 0:
            raise ConfigurationError("Benchmarks need a nonempty valuation sequence")

    @staticmethod
    def fixed_price_value(seq: ValuationSequence, price: float) -> float:
        mask = (seq.s <= price) & (price <= seq.b)
        return math.fsum((seq.b[mask] - seq.s[mask]).tolist())

    @staticmethod
    def best_fixed_price(seq: ValuationSequence) -> FixedPriceResult:
        """
        Maximize sum_t (b_t - s_t) 1{s_t <= p <= b_t} over the breakpoints {0,1} U {s_t} U {b_t}.

        A cumulative sweep ranks the candidates; the near-maximal ones are then
        re-evaluated with correctly rounded sums and ties go to the smallest price.
        """
        BenchmarkService._require_nonempty(seq)
        s, b = seq.s, seq.b
        active = s <= b
        if not active.any():
            return FixedPriceResult(price=0.0, value=0.0)

        cand = np.unique(np.concatenate(([0.0, 1.0], s, b)))
        w = b[active] - s[active]
        s_order = np.argsort(s[active], kind="stable")
        b_order = np.argsort(b[active], kind="stable")
        s_sorted = s[active][s_order]
        b_sorted = b[active][b_order]
        s_cum = np.concatenate(([0.0], np.cumsum(w[s_order])))
        b_cum = np.concatenate(([0.0], np.cumsum(w[b_order])))
        opened = s_cum[np.searchsorted(s_sorted, cand, side="right")]
        closed = b_cum[np.searchsorted(b_sorted, cand, side="left")]
        approx = opened - closed

        tol = 1e-9 * (1.0 + float(np.abs(w).sum()))
        near = np.flatnonzero(approx >= approx.max() - tol)
        best_price, best_value = None, -math.inf
        for idx in near:
            price = float(cand[idx])
            value = BenchmarkService.fixed_price_value(seq, price)
            if value > best_value:
                best_price, best_value = price, value
        return FixedPriceResult(price=best_price, value=best_value)

    @staticmethod
    def best_pair_on_grid(seq: ValuationSequence, grid: PriceGrid, objective: str = "gft") -> GridPairResult:
        """Exact argmax by enumeration; ties go to the lexicographically smallest pair"""
        if len(grid) == 0:
            raise ConfigurationError("Grid is empty")
        totals = PayoffService.total_per_pair(seq, grid.p, grid.q, objective)
        best = max(totals)
        winners = [i for i, v in enumerate(totals) if v == best]
        i = min(winners, key=lambda k: (grid.p[k], grid.q[k]))
        return GridPairResult(
            pair=PriceQuote(p=float(grid.p[i]), q=float(grid.q[i])),
            value=best,
            objective=objective,
        )

    @staticmethod
    def _mixture(seq: ValuationSequence, a: PricePair, b: PricePair) -> MixedPriceStrategy:
        """Mix a (revenue > 0) with b (revenue < 0) so expected revenue is exactly zero"""
        f_a = Fraction(PayoffService.total(seq, a, "gft"))
        g_a = Fraction(PayoffService.total(seq, a, "rev"))
        f_b = Fraction(PayoffService.total(seq, b, "gft"))
        g_b = Fraction(PayoffService.total(seq, b, "rev"))
        w_a = -g_b / (g_a - g_b)
        w_b = g_a / (g_a - g_b)
        return MixedPriceStrategy(
            support=[PriceQuote(p=a.p, q=a.q), PriceQuote(p=b.p, q=b.q)],
            weights=[float(w_a), float(w_b)],
            weights_exact=[str(w_a), str(w_b)],
            value=float(w_a * f_a + w_b * f_b),
            expected_revenue=float(w_a * g_a + w_b * g_b),
        )

    @staticmethod
    def _single(seq: ValuationSequence, pair: PricePair) -> MixedPriceStrategy:
        return MixedPriceStrategy(
            support=[PriceQuote(p=pair.p, q=pair.q)],
            weights=[1.0],
            weights_exact=["1"],
            value=PayoffService.total(seq, pair, "gft"),
            expected_revenue=PayoffService.total(seq, pair, "rev"),
        )

    @staticmethod
    def _best_single(seq: ValuationSequence, cloud: _GridCloud) -> MixedPriceStrategy:
        feasible = np.flatnonzero(cloud.g >= 0.0)
        k = feasible[np.argmax(cloud.f[feasible])]
        return BenchmarkService._single(seq, cloud.pair(k))

    @staticmethod
    def _upper_hull(g: np.ndarray, f: np.ndarray) -> List[int]:
        """Indices of the upper concave envelope of the (g, f) cloud, left to right"""
        order = np.lexsort((-f, g))
        g_sorted = g[order]
        first = np.concatenate(([True], g_sorted[1:] != g_sorted[:-1]))
        idx = order[first].tolist()
        gs, fs = g.tolist(), f.tolist()
        hull: List[int] = []
        for k in idx:
            while len(hull) >= 2:
                o, a = hull[-2], hull[-1]
                cross = (gs[a] - gs[o]) * (fs[k] - fs[o]) - (fs[a] - fs[o]) * (gs[k] - gs[o])
                if cross >= 0.0:
                    hull.pop()
                else:
                    break
            hull.append(k)
        return hull

    @staticmethod
    def best_feasible_distribution(seq: ValuationSequence) -> MixedPriceStrategy:
        """
        Best distribution over price pairs with nonnegative expected revenue.

        Support is searched on the valuation grid {0,1,s_t} x {0,1,b_t}: the best
        single point with revenue >= 0, and the upper hull of the (revenue, GFT)
        cloud evaluated at revenue 0.
        """
        BenchmarkService._require_nonempty(seq)
        cloud = _GridCloud(seq)
        best = BenchmarkService._best_single(seq, cloud)

        hull = BenchmarkService._upper_hull(cloud.g, cloud.f)
        for left, right in zip(hull, hull[1:]):
            if cloud.g[left] < 0.0 < cloud.g[right]:
                mixed = BenchmarkService._mixture(seq, cloud.pair(right), cloud.pair(left))
                if mixed.value > best.value and mixed.expected_revenue >= 0.0:
                    best = mixed
                break
        return best

    @staticmethod
    def best_feasible_distribution_bruteforce(seq: ValuationSequence) -> MixedPriceStrategy:
        """O(M^2) pairwise oracle over the valuation grid, for small sequences"""
        BenchmarkService._require_nonempty(seq)
        cloud = _GridCloud(seq)
        best = BenchmarkService._best_single(seq, cloud)
        pos = np.flatnonzero(cloud.g > 0.0)
        neg = np.flatnonzero(cloud.g < 0.0)
        if pos.size and neg.size:
            g_a, f_a = cloud.g[pos][:, None], cloud.f[pos][:, None]
            g_b, f_b = cloud.g[neg][None, :], cloud.f[neg][None, :]
            values = (-g_b * f_a + g_a * f_b) / (g_a - g_b)
            ia, ib = np.unravel_index(np.argmax(values), values.shape)
            mixed = BenchmarkService._mixture(seq, cloud.pair(pos[ia]), cloud.pair(neg[ib]))
            if mixed.value > best.value and mixed.expected_revenue >= 0.0:
                best = mixed
        return best

    @staticmethod
    def hindsight_report(seq: ValuationSequence, which: str = "both") -> HindsightReport:
        if which not in ("fixed", "distribution", "both"):
            raise ConfigurationError(f"Unknown benchmark selection: {which}")
        report = HindsightReport(T=len(seq))
        if which in ("fixed", "both"):
            report.best_fixed_price = BenchmarkService.best_fixed_price(seq)
        if which in ("distribution", "both"):
            report.best_distribution = BenchmarkService.best_feasible_distribution(seq)
        if which == "both":
            fixed = report.best_fixed_price.value
            report.ratio = "undefined" if fixed == 0.0 else report.best_distribution.value / fixed
        return report

    @staticmethod
    def regret(seq: ValuationSequence, trace: RunTrace, benchmark: str = "fixed-price", alpha: float = 1.0) -> float:
        """Benchmark value minus alpha times the trace's realized GFT"""
        if len(trace) != len(seq):
            raise ConfigurationError(f"Trace length {len(trace)} does not match sequence length {len(seq)}")
        if benchmark == "fixed-price":
            value = BenchmarkService.best_fixed_price(seq).value
        elif benchmark == "distribution":
            value = BenchmarkService.best_feasible_distribution(seq).value
        else:
            raise ConfigurationError(f"Unknown benchmark: {benchmark}")
        return value - alpha * trace.total_gft

    @staticmethod
    def candidate_prices(seq: ValuationSequence) -> Tuple[float, ...]:
        return tuple(np.unique(np.concatenate(([0.0, 1.0], seq.s, seq.b))).tolist())
