import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from app.config import settings
from app.exceptions import ConfigurationError, InfeasiblePostError
from app.models import (
    PHASE_GFT,
    PHASE_REVENUE,
    BudgetLedger,
    FeedbackModel,
    GridKind,
    PriceGrid,
    PricePair,
    RunTrace,
    TraceRecorder,
)
from app.models.sequence import ValuationSequence
from app.schemas.simulation import GftMaxConfig, RunSummary
from app.services.benchmark_service import BenchmarkService
from app.services.discretization_service import log_factor
from app.services.grid_service import GridService
from app.services.learners import BlockDecomposition, Exp3P, Hedge
from app.services.payoff_service import PayoffService

logger = logging.getLogger(__name__)

RevenueLearner = Union[Hedge, Exp3P]


@dataclass
class _Market:
    """Posts prices against the sequence, enforcing feasibility and recording the trace"""

    seq: ValuationSequence
    ledger: BudgetLedger
    recorder: TraceRecorder

    def post(self, t: int, phase: int, p: float, q: float) -> bool:
        if p - q > self.ledger.current:
            raise InfeasiblePostError(t + 1, p, q, self.ledger.current, "I" if phase == PHASE_REVENUE else "II")
        s = float(self.seq.s[t])
        b = float(self.seq.b[t])
        trade = s <= p and q <= b
        gft = b - s if trade else 0.0
        rev = q - p if trade else 0.0
        budget = self.ledger.record(rev)
        self.recorder.record(phase, p, q, s, b, gft, rev, budget)
        return trade


class GftMaxService:
    """Two-phase GFT-Max: accumulate budget on F_K, then spend at most 1/K per round chasing GFT on H_K"""

    @staticmethod
    def _revenue_phase(beta: float, grid: PriceGrid, learner: RevenueLearner, market: _Market,
                       feedback: FeedbackModel, rng: np.random.Generator) -> Optional[int]:
        for t in range(len(market.seq)):
            a = learner.sample(rng)
            p, q = float(grid.p[a]), float(grid.q[a])
            trade = market.post(t, PHASE_REVENUE, p, q)
            if feedback is FeedbackModel.FULL:
                s, b = float(market.seq.s[t]), float(market.seq.b[t])
                learner.update(PayoffService.rev_vector(grid.p, grid.q, s, b))
            else:
                # q - p is known, so the trade bit reconstructs the realized revenue
                learner.update(a, (q - p) if trade else 0.0)
            if market.ledger.current >= beta:
                return t + 1
        return None

    @staticmethod
    def revenue_max(beta: float, grid: PriceGrid, learner: RevenueLearner, seq: ValuationSequence,
                    feedback: FeedbackModel, rng: np.random.Generator) -> Tuple[Optional[int], RunTrace]:
        """Run the revenue phase alone; tau is the first round with B_t >= beta, or None"""
        if grid.kind is not GridKind.REVENUE:
            raise ConfigurationError("revenue_max needs a revenue grid")
        n = learner.n
        if n != len(grid):
            raise ConfigurationError(f"Learner has {n} actions but the grid has {len(grid)} pairs")
        market = _Market(seq, BudgetLedger(), TraceRecorder(len(seq)))
        tau = GftMaxService._revenue_phase(beta, grid, learner, market, FeedbackModel(feedback), rng)
        return tau, market.recorder.finish(tau)

    @staticmethod
    def _revenue_learner(config: GftMaxConfig, n: int) -> RevenueLearner:
        lc = config.learners
        if config.feedback == "full":
            return Hedge(n, config.T, lc.revenue_range, eta=lc.hedge_eta_revenue)
        delta = lc.exp3p_delta if lc.exp3p_delta is not None else settings.EXP3P_DELTA
        return Exp3P(n, config.T, delta=delta, reward_range=lc.revenue_range,
                     gamma=lc.exp3p_gamma, alpha=lc.exp3p_alpha)

    @staticmethod
    def _gft_phase_full(config: GftMaxConfig, market: _Market, start: int, rng: np.random.Generator) -> None:
        grid = GridService.adjacent_pairs(config.K)
        # rewards on H_K lie in [-1/K, 1]; the rate uses the full horizon T
        hedge = Hedge(len(grid), config.T, (-1.0 / config.K, 1.0), eta=config.learners.hedge_eta_gft)
        for t in range(start, len(market.seq)):
            a = hedge.sample(rng)
            market.post(t, PHASE_GFT, float(grid.p[a]), float(grid.q[a]))
            s, b = float(market.seq.s[t]), float(market.seq.b[t])
            hedge.update(PayoffService.gft_vector(grid.p, grid.q, s, b))

    @staticmethod
    def _gft_phase_one_bit(config: GftMaxConfig, market: _Market, start: int, rng: np.random.Generator) -> int:
        length = len(market.seq) - start
        learner = BlockDecomposition.for_phase(length, config.N, config.K, rng, config.learners.estimator_variant)
        for local in range(length):
            t = start + local
            learner.step(local, rng, lambda pair, t=t: market.post(t, PHASE_GFT, pair.p, pair.q))
        return learner.exploration_rounds

    @staticmethod
    def gft_max(config: GftMaxConfig, seq: ValuationSequence) -> RunTrace:
        trace, _ = GftMaxService.run(config, seq)
        return trace

    @staticmethod
    def run(config: GftMaxConfig, seq: ValuationSequence) -> Tuple[RunTrace, int]:
        """Full two-phase run; returns the trace and the number of one-bit exploration rounds"""
        if len(seq) != config.T:
            raise ConfigurationError(f"Sequence length {len(seq)} does not match T={config.T}")
        rng = np.random.default_rng(config.seed)
        feedback = FeedbackModel(config.feedback)
        # the revenue grid needs T >= 2; a one-round run only ever sees phase I
        grid_f = GridService.revenue_grid(config.K, max(config.T, 2))
        learner = GftMaxService._revenue_learner(config, len(grid_f))
        market = _Market(seq, BudgetLedger(), TraceRecorder(config.T))

        tau = GftMaxService._revenue_phase(config.beta, grid_f, learner, market, feedback, rng)
        explored = 0
        if tau is not None and tau < config.T:
            logger.debug("Budget %.6g reached beta=%.6g at round %d", market.ledger.current, config.beta, tau)
            if feedback is FeedbackModel.FULL:
                GftMaxService._gft_phase_full(config, market, tau, rng)
            else:
                explored = GftMaxService._gft_phase_one_bit(config, market, tau, rng)
        return market.recorder.finish(tau), explored

    @staticmethod
    def theoretical_bound(feedback: str, T: int, base: Optional[str] = None) -> Tuple[float, bool]:
        """Regret bound value and whether it is vacuous (>= T, or T < 2 where the log factors vanish)"""
        lg = log_factor(T, base) if T > 1 else 0.0
        if feedback == "full":
            bound = 92.0 * lg ** 1.5 * math.sqrt(T)
        else:
            bound = 1282.0 * T ** 0.75 * lg ** 2
        return bound, (T < 2 or bound >= T)

    @staticmethod
    def summarize(config: GftMaxConfig, seq: ValuationSequence, trace: RunTrace,
                  explored: int = 0, base: Optional[str] = None) -> RunSummary:
        base = base or settings.LOG_BASE
        best = BenchmarkService.best_fixed_price(seq)
        total = trace.total_gft
        bound, vacuous = GftMaxService.theoretical_bound(config.feedback, config.T, base)
        summary = RunSummary(
            config=config,
            T=config.T,
            tau=trace.tau,
            phase_two_reached=trace.phase_two_reached,
            total_gft=total,
            total_rev=trace.total_rev,
            best_fixed_price=best.price,
            best_fixed_price_value=best.value,
            regret=best.value - total,
            budget_final=trace.budget_final,
            budget_min=float(trace.budget.min()) if len(trace) else 0.0,
            exploration_rounds=explored,
            bound_value=bound,
            bound_vacuous=vacuous,
            log_base=base,
        )
        if not summary.phase_two_reached:
            logger.info("Run seed=%d T=%d: phase II unreached", config.seed, config.T)
        if summary.budget_final < 0.0:
            logger.warning("Run seed=%d T=%d ended with negative budget %r", config.seed, config.T, summary.budget_final)
        return summary

    @staticmethod
    def simulate(config: GftMaxConfig, seq: ValuationSequence) -> Tuple[RunTrace, RunSummary]:
        trace, explored = GftMaxService.run(config, seq)
        return trace, GftMaxService.summarize(config, seq, trace, explored)
