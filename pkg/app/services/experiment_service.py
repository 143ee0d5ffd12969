import logging
import math
import os
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy import stats

from app.config import settings
from app.exceptions import BilateralTradeError, ConfigurationError
from app.models import FiniteValuationDistribution, RunTrace, ValuationSequence
from app.models.lower_bound import TwoBitLBParams
from app.schemas.adversary import AdversarySpec
from app.schemas.experiment import (
    AggregateResult,
    ExperimentConfig,
    HorizonResult,
    ReplicationResult,
    SimulationRequest,
    SimulationResponse,
    SlopeFit,
)
from app.schemas.simulation import GftMaxConfig
from app.services.adversary_service import AdversaryService
from app.services.benchmark_service import BenchmarkService
from app.services.gftmax_service import GftMaxService
from app.services.lower_bound_service import LowerBoundService
from app.services.storage_service import StorageService
from app.tasks.pool import fan_out

logger = logging.getLogger(__name__)

DEFAULT_GAP_EPS = 0.05
DEFAULT_LB_N = 64


def replication_seeds(master: int, T: int, index: int) -> Tuple[int, int]:
    """(adversary seed, algorithm seed) for replication `index` at horizon T"""
    state = np.random.SeedSequence([master, T, index]).generate_state(2)
    return int(state[0]), int(state[1])


@lru_cache(maxsize=16)
def _twobit_distribution(N: int, k: int, eps: Optional[float], w5_upper: bool) -> FiniteValuationDistribution:
    params = TwoBitLBParams.build(N, k, eps, w5_upper=w5_upper)
    return LowerBoundService.twobit_lb_distribution(params)


class ExperimentService:
    """Seeded replications of GFT-Max over horizons, aggregated into a regret curve"""

    @staticmethod
    def make_sequence(spec: AdversarySpec, T: int, rng: np.random.Generator) -> ValuationSequence:
        family = spec.family
        if family == "iid":
            if spec.distribution is None:
                return AdversaryService.uniform_sequence(T, rng)
            dist = AdversaryService.distribution_from_spec(spec.distribution)
            return AdversaryService.iid_sequence(dist, T, rng)
        if family == "full-lb":
            return AdversaryService.iid_sequence(AdversaryService.full_lb_distribution(), T, rng)
        if family == "twobit-lb":
            dist = _twobit_distribution(spec.N or DEFAULT_LB_N, spec.k, spec.eps, spec.w5_upper)
            return AdversaryService.iid_sequence(dist, T, rng)
        if family == "gap":
            return AdversaryService.benchmark_gap_sequence(spec.eps or DEFAULT_GAP_EPS, T)
        if family == "alpha-lb":
            pair = AdversaryService.alpha_lb_sequences(T, rng)
            return pair.s1 if spec.alpha_variant == "S1" else pair.s2
        raise ConfigurationError(f"Unknown adversary family: {family}")

    @staticmethod
    def build_config(config: ExperimentConfig, T: int, seed: int) -> GftMaxConfig:
        return GftMaxConfig.preset(config.algo, T, seed=seed, learners=config.learners)

    @staticmethod
    def trace_dir(config: ExperimentConfig) -> str:
        if config.out_dir:
            return os.path.join(config.out_dir, "traces")
        return os.path.join(settings.traces_dir, config.name)

    @staticmethod
    def run_replication(task: Tuple[ExperimentConfig, int, int]) -> ReplicationResult:
        """One replication; invariant violations abort it with a logged diagnostic"""
        config, T, index = task
        adv_seed, algo_seed = replication_seeds(config.master_seed, T, index)
        result = ReplicationResult(T=T, index=index, adversary_seed=adv_seed, algorithm_seed=algo_seed)
        try:
            seq = ExperimentService.make_sequence(config.adversary, T, np.random.default_rng(adv_seed))
            gcfg = ExperimentService.build_config(config, T, algo_seed)
            trace, summary = GftMaxService.simulate(gcfg, seq)
        except BilateralTradeError as e:
            logger.error("Replication %d at T=%d aborted (seeds %d/%d): %s", index, T, adv_seed, algo_seed, e)
            result.error = str(e)
            return result
        result.summary = summary
        if config.save_traces:
            path = os.path.join(ExperimentService.trace_dir(config), f"T{T}_r{index}.csv")
            result.trace_path = StorageService.save_trace(trace, path)
        return result

    @staticmethod
    def _aggregate_horizon(config: ExperimentConfig, T: int, results: List[ReplicationResult]) -> HorizonResult:
        done = [r.summary for r in results if r.summary is not None]
        bound, vacuous = GftMaxService.theoretical_bound(config.algo, T, settings.LOG_BASE)
        if not done:
            nan = math.nan
            return HorizonResult(
                T=T, replications=len(results), completed=0, aborted=len(results),
                mean_regret=nan, std_regret=nan, mean_budget=nan, min_budget=nan,
                no_phase_two_fraction=nan, mean_total_gft=nan, mean_best_fixed_price=nan,
                bound_value=bound, bound_vacuous=vacuous,
            )
        regret = np.array([s.regret for s in done])
        budget = np.array([s.budget_final for s in done])
        mean_regret = math.fsum(regret.tolist()) / len(done)
        holds = None
        if config.check_bound and not vacuous:
            holds = mean_regret <= bound
        elif vacuous:
            logger.warning("Regret bound %.4g is vacuous at T=%d", bound, T)
        return HorizonResult(
            T=T,
            replications=len(results),
            completed=len(done),
            aborted=len(results) - len(done),
            mean_regret=mean_regret,
            std_regret=float(regret.std(ddof=1)) if len(done) > 1 else 0.0,
            mean_budget=math.fsum(budget.tolist()) / len(done),
            min_budget=float(budget.min()),
            no_phase_two_fraction=sum(not s.phase_two_reached for s in done) / len(done),
            mean_total_gft=math.fsum(s.total_gft for s in done) / len(done),
            mean_best_fixed_price=math.fsum(s.best_fixed_price_value for s in done) / len(done),
            bound_value=bound,
            bound_vacuous=vacuous,
            bound_holds=holds,
        )

    @staticmethod
    def fit_slope(rows: List[HorizonResult]) -> Optional[SlopeFit]:
        """OLS of log mean regret on log T over horizons >= SLOPE_MIN_HORIZON"""
        usable = [
            r for r in rows
            if r.T >= settings.SLOPE_MIN_HORIZON and math.isfinite(r.mean_regret) and r.mean_regret > 0
        ]
        if len(usable) < settings.SLOPE_MIN_POINTS:
            return None
        x = np.log([r.T for r in usable])
        y = np.log([r.mean_regret for r in usable])
        fit = stats.linregress(x, y)
        half = stats.t.ppf(0.975, len(usable) - 2) * fit.stderr
        return SlopeFit(
            slope=float(fit.slope), intercept=float(fit.intercept), std_err=float(fit.stderr),
            ci_low=float(fit.slope - half), ci_high=float(fit.slope + half),
            horizons=[r.T for r in usable],
        )

    @staticmethod
    def regret_curve(config: ExperimentConfig) -> Tuple[AggregateResult, List[ReplicationResult]]:
        tasks = [(config, T, i) for T in config.horizons for i in range(config.replications)]
        logger.info("Running %s: algo=%s family=%s horizons=%s reps=%d seed=%d",
                    config.name, config.algo, config.adversary.family, config.horizons,
                    config.replications, config.master_seed)
        results = fan_out(ExperimentService.run_replication, tasks, config.workers)
        results.sort(key=lambda r: (r.T, r.index))

        rows = [
            ExperimentService._aggregate_horizon(config, T, [r for r in results if r.T == T])
            for T in config.horizons
        ]
        aggregate = AggregateResult(
            name=config.name,
            algo=config.algo,
            family=config.adversary.family,
            master_seed=config.master_seed,
            horizons=rows,
            slope=ExperimentService.fit_slope(rows),
            aborted=sum(r.aborted for r in results),
        )
        for row in rows:
            logger.info("T=%d mean regret %.6g (sd %.3g), mean budget %.6g, phase II unreached in %.1f%%",
                        row.T, row.mean_regret, row.std_regret, row.mean_budget,
                        100.0 * row.no_phase_two_fraction)
        return aggregate, results

    @staticmethod
    def run(config: ExperimentConfig, persist: bool = True) -> AggregateResult:
        """Regret curve plus the curve CSV and summary JSON artifacts"""
        aggregate, _ = ExperimentService.regret_curve(config)
        if persist:
            if config.out_dir:
                curve = os.path.join(config.out_dir, "curve.csv")
                summary = os.path.join(config.out_dir, "summary.json")
            else:
                curve = os.path.join(settings.curves_dir, f"{config.name}.csv")
                summary = os.path.join(settings.summaries_dir, f"{config.name}.json")
            aggregate.artifacts = {"curve": curve, "summary": summary}
            StorageService.save_curve(aggregate.horizons, curve)
            StorageService.save_json(aggregate, summary)
        if aggregate.aborted:
            logger.error("%d replications aborted", aggregate.aborted)
        return aggregate

    @staticmethod
    def simulate_once(request: SimulationRequest) -> Tuple[RunTrace, SimulationResponse]:
        """One run on an inline sequence, or on a generated one seeded from request.seed"""
        adv_seed = None
        if request.sequence is not None:
            seq = request.sequence.to_sequence()
            algo_seed = request.seed
        else:
            adv_seed, algo_seed = replication_seeds(request.seed, request.T, 0)
            seq = ExperimentService.make_sequence(request.adversary, request.T, np.random.default_rng(adv_seed))
        config = GftMaxConfig.preset(request.algo, len(seq), seed=algo_seed, learners=request.learners)
        trace, summary = GftMaxService.simulate(config, seq)
        benchmarks = BenchmarkService.hindsight_report(seq) if request.include_benchmarks else None
        return trace, SimulationResponse(
            summary=summary, adversary_seed=adv_seed, algorithm_seed=algo_seed, benchmarks=benchmarks,
        )
