import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy import stats

from app.exceptions import ConfigurationError
from app.models import FiniteValuationDistribution, ValuationSequence
from app.schemas.adversary import (
    AlphaLBReport,
    AlphaLBRun,
    AlphaReferenceMixture,
    DistributionSpec,
    FullLBCase,
    FullLBCaseTable,
    GapMixtureReport,
    MonteCarloCheck,
)
from app.schemas.simulation import GftMaxConfig
from app.services.benchmark_service import BenchmarkService
from app.services.gftmax_service import GftMaxService

logger = logging.getLogger(__name__)

# (s, b, count) with exact coordinates
WeightedPoint = Tuple[Fraction, Fraction, int]

FULL_LB_POINTS = (
    (Fraction(0), Fraction(1, 4)),
    (Fraction(3, 4), Fraction(1)),
    (Fraction(3, 4), Fraction(1, 4)),
)
ALPHA_LOW = (Fraction(0), Fraction(1, 3))
ALPHA_HIGH = (Fraction(2, 3), Fraction(1))


def exact_totals(points: Iterable[WeightedPoint], p: Fraction, q: Fraction) -> Tuple[Fraction, Fraction]:
    """Exact (total GFT, total revenue) of posting (p, q) against weighted valuations"""
    gft = Fraction(0)
    rev = Fraction(0)
    for s, b, count in points:
        if s <= p and q <= b:
            gft += count * (b - s)
            rev += count * (q - p)
    return gft, rev


@dataclass(frozen=True)
class AlphaLBSequences:
    s1: ValuationSequence
    s2: ValuationSequence
    most_frequent: Tuple[Fraction, Fraction]
    low_count: int  # first-half rounds equal to (0, 1/3)


class AdversaryService:
    """Oblivious valuation-sequence generators"""

    @staticmethod
    def distribution_from_spec(spec: DistributionSpec) -> FiniteValuationDistribution:
        if len(spec.support) != len(spec.probs):
            raise ConfigurationError("support and probs must have the same length")
        try:
            return FiniteValuationDistribution(
                s=np.array([pt.s for pt in spec.support]),
                b=np.array([pt.b for pt in spec.support]),
                probs=np.array(spec.probs, dtype=np.float64),
            )
        except ValueError as e:
            raise ConfigurationError(str(e)) from e

    @staticmethod
    def iid_sequence(dist: FiniteValuationDistribution, T: int, rng: np.random.Generator) -> ValuationSequence:
        if T < 0:
            raise ConfigurationError(f"T must be nonnegative, got {T}")
        idx = rng.choice(len(dist), size=T, p=dist.probs / dist.probs.sum())
        return ValuationSequence(dist.s[idx].copy(), dist.b[idx].copy())

    @staticmethod
    def uniform_sequence(T: int, rng: np.random.Generator) -> ValuationSequence:
        if T < 0:
            raise ConfigurationError(f"T must be nonnegative, got {T}")
        s = rng.random(T)
        b = rng.random(T)
        return ValuationSequence(s, b)

    # -- full-feedback lower bound ------------------------------------------------

    @staticmethod
    def full_lb_distribution() -> FiniteValuationDistribution:
        third = Fraction(1, 3)
        return FiniteValuationDistribution.from_exact(
            [(s, b, third) for s, b in FULL_LB_POINTS], labels=["A", "B", "C"]
        )

    @staticmethod
    def _full_lb_expected(p: Fraction, q: Fraction) -> Fraction:
        gft, _ = exact_totals(((s, b, 1) for s, b in FULL_LB_POINTS), p, q)
        return gft / 3

    @staticmethod
    def full_lb_case_table(probe: int = 48) -> FullLBCaseTable:
        """Per-round expected GFT in each of the four price regions, plus a probe-grid maximum"""
        three_q, one_q = Fraction(3, 4), Fraction(1, 4)
        cases = [
            ("p < 3/4, q > 1/4", Fraction(1, 2), Fraction(1, 2), Fraction(0)),
            ("p < 3/4, q <= 1/4", Fraction(1, 2), one_q, Fraction(1, 12)),
            ("p >= 3/4, q > 1/4", three_q, Fraction(1, 2), Fraction(1, 12)),
            ("p >= 3/4, q <= 1/4", three_q, one_q, Fraction(0)),
        ]
        rows = []
        for region, p, q, closed in cases:
            value = AdversaryService._full_lb_expected(p, q)
            rows.append(FullLBCase(
                region=region, p=str(p), q=str(q),
                expected_gft=str(value), closed_form=str(closed), matches=value == closed,
            ))
        ticks = [Fraction(i, probe) for i in range(probe + 1)]
        best = max(AdversaryService._full_lb_expected(p, q) for p in ticks for q in ticks)
        return FullLBCaseTable(cases=rows, probe_size=len(ticks) ** 2, probe_max=str(best))

    @staticmethod
    def random_walk_mean_abs(n: int) -> float:
        """E|S_n| for a simple +-1 random walk, from the binomial law"""
        if n < 0:
            raise ConfigurationError(f"n must be nonnegative, got {n}")
        x = np.arange(n + 1)
        pmf = stats.binom.pmf(x, n, 0.5)
        return math.fsum((pmf * np.abs(2 * x - n)).tolist())

    @staticmethod
    def full_lb_best_price_estimate(T: int, reps: int, rng: np.random.Generator,
                                    cross_check: int = 5) -> MonteCarloCheck:
        """
        Monte Carlo estimate of E[max_p sum_t GFT_t(p)] on the three-point instance.

        Only A = (0, 1/4) and B = (3/4, 1) can trade at a fixed price and they
        never share one, so the hindsight optimum is max(n_A, n_B)/4.
        """
        if T < 1 or reps < 2:
            raise ConfigurationError("Need T >= 1 and at least two replications")
        counts = rng.multinomial(T, [1 / 3, 1 / 3, 1 / 3], size=reps)
        values = np.maximum(counts[:, 0], counts[:, 1]) / 4.0

        dist = AdversaryService.full_lb_distribution()
        for row, value in zip(counts[:cross_check], values[:cross_check]):
            seq = ValuationSequence(np.repeat(dist.s, row), np.repeat(dist.b, row))
            oracle = BenchmarkService.best_fixed_price(seq).value
            if oracle != value:
                raise RuntimeError(f"best fixed price {oracle!r} disagrees with max(nA, nB)/4 = {value!r}")

        mean = float(values.mean())
        se = float(values.std(ddof=1) / math.sqrt(reps))
        target = T / 12 + 5 * math.sqrt(T) / 216
        return MonteCarloCheck(
            name="full-lb-best-price", reps=reps, mean=mean, std_err=se,
            target=target, passed=mean + 3 * se >= target,
        )

    # -- benchmark separation ---------------------------------------------------

    @staticmethod
    def _check_gap_eps(epsilon: float) -> Fraction:
        if not 0 < epsilon < 0.125:
            raise ConfigurationError(f"epsilon must lie in (0, 1/8), got {epsilon}")
        return Fraction(repr(float(epsilon)))

    @staticmethod
    def benchmark_gap_sequence(epsilon: float, T: int) -> ValuationSequence:
        """(0, 1/2 - eps) on odd rounds, (1/2 + eps, 1) on even rounds"""
        AdversaryService._check_gap_eps(epsilon)
        if T < 2 or T % 2:
            raise ConfigurationError(f"T must be a positive even number, got {T}")
        odd = np.arange(T) % 2 == 0
        s = np.where(odd, 0.0, 0.5 + epsilon)
        b = np.where(odd, 0.5 - epsilon, 1.0)
        return ValuationSequence(s, b)

    @staticmethod
    def gap_mixture(epsilon: float, T: int) -> GapMixtureReport:
        """Exact value of the revenue-neutral mixture that doubles the fixed-price benchmark"""
        eps = AdversaryService._check_gap_eps(epsilon)
        if T < 2 or T % 2:
            raise ConfigurationError(f"T must be a positive even number, got {T}")
        half = Fraction(1, 2)
        points = [(Fraction(0), half - eps, T // 2), (half + eps, Fraction(1), T // 2)]
        alpha = (1 - 2 * eps) / (1 + 6 * eps)
        g_cross, r_cross = exact_totals(points, half + eps, half - eps)
        g_low, r_low = exact_totals(points, Fraction(0), half - eps)
        gft = alpha * g_cross + (1 - alpha) * g_low
        rev = alpha * r_cross + (1 - alpha) * r_low
        fixed = Fraction(T, 2) * (half - eps)
        ratio = gft / fixed
        floor = 2 - 8 * eps
        return GapMixtureReport(
            epsilon=str(eps), T=T, alpha=str(alpha),
            expected_revenue=str(rev), expected_gft=str(gft), fixed_price_value=str(fixed),
            ratio=float(ratio), ratio_floor=float(floor),
            holds=rev >= 0 and ratio >= floor,
        )

    @staticmethod
    def alpha_lb_sequences(T: int, rng: np.random.Generator) -> AlphaLBSequences:
        """
        S1 and S2 share a uniform first half over {(0,1/3), (2/3,1)}. S1 then
        stays at (0,0); S2 repeats the most frequent first-half value, with ties
        going to (0, 1/3).
        """
        if T < 4 or T % 4:
            raise ConfigurationError(f"T must be a positive multiple of 4, got {T}")
        half = T // 2
        draws = rng.integers(0, 2, size=half)
        low = int(half - draws.sum())
        top = ALPHA_HIGH if half - low > low else ALPHA_LOW

        first_s = np.where(draws == 0, float(ALPHA_LOW[0]), float(ALPHA_HIGH[0]))
        first_b = np.where(draws == 0, float(ALPHA_LOW[1]), float(ALPHA_HIGH[1]))
        s1 = ValuationSequence(np.concatenate((first_s, np.zeros(half))), np.concatenate((first_b, np.zeros(half))))
        s2 = ValuationSequence(
            np.concatenate((first_s, np.full(half, float(top[0])))),
            np.concatenate((first_b, np.full(half, float(top[1])))),
        )
        return AlphaLBSequences(s1=s1, s2=s2, most_frequent=top, low_count=low)

    @staticmethod
    def alpha_reference_mixture(T: int, sequences: AlphaLBSequences) -> AlphaReferenceMixture:
        """4/7 on the most frequent valuation, 3/7 on (2/3, 1/3), evaluated exactly on S2"""
        half = T // 2
        low = sequences.low_count
        top = sequences.most_frequent
        points: List[WeightedPoint] = [
            (ALPHA_LOW[0], ALPHA_LOW[1], low),
            (ALPHA_HIGH[0], ALPHA_HIGH[1], half - low),
            (top[0], top[1], half),
        ]
        g_top, r_top = exact_totals(points, top[0], top[1])
        g_cross, r_cross = exact_totals(points, Fraction(2, 3), Fraction(1, 3))
        gft = Fraction(4, 7) * g_top + Fraction(3, 7) * g_cross
        rev = Fraction(4, 7) * r_top + Fraction(3, 7) * r_cross
        floor = Fraction(2 * T, 7)
        return AlphaReferenceMixture(
            most_frequent=(float(top[0]), float(top[1])),
            expected_gft=str(gft), expected_revenue=str(rev), gft_floor=str(floor),
            holds=gft >= floor and rev >= 0,
        )

    @staticmethod
    def alpha_lb_report(T: int, rng: np.random.Generator, feedback: str = "full",
                        seed: Optional[int] = None) -> AlphaLBReport:
        sequences = AdversaryService.alpha_lb_sequences(T, rng)
        seed = int(rng.integers(2**31)) if seed is None else seed
        config = GftMaxConfig.preset(feedback, T, seed=seed)
        runs = []
        for name, seq in (("S1", sequences.s1), ("S2", sequences.s2)):
            _, summary = GftMaxService.simulate(config, seq)
            runs.append(AlphaLBRun(name=name, summary=summary,
                                   benchmarks=BenchmarkService.hindsight_report(seq)))
        reference = AdversaryService.alpha_reference_mixture(T, sequences)
        if not reference.holds:
            logger.error("Reference mixture on S2 misses its guarantee: %s", reference)
        return AlphaLBReport(T=T, feedback=feedback, runs=runs, reference=reference)
