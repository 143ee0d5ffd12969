from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Tuple

import numpy as np

from app.models import FeedbackModel, PricePair, Valuation
from app.services.grid_service import GridService
from app.services.payoff_service import PayoffService

BRANCH_SELLER = "seller-probe"
BRANCH_BUYER = "buyer-probe"


class EstimatorVariant(str, Enum):
    # buyer probe posts (p + 1/K, U[p,1]); mean matches the closed form exactly
    CONSISTENT = "consistent"
    # buyer probe posts (p, U[p,1]); biased when s falls in (p, p + 1/K]
    LITERAL = "literal"


@dataclass(frozen=True)
class GftEstimate:
    value: int
    posted: PricePair
    branch: str


class GftEstimator:
    """
    One-bit estimate of GFT(p + 1/K, p) for an adjacent pair of H_K.

    With probability (p + 1/K)/(1 + 1/K) the seller price is drawn from
    U[0, p + 1/K] against buyer price p; otherwise the buyer price is drawn
    from U[p, 1]. The estimate is the trade bit of the posted pair, and every
    posted pair loses at most 1/K when it trades.
    """

    def __init__(self, K: int, variant: EstimatorVariant = EstimatorVariant.CONSISTENT):
        self.grid = GridService.adjacent_pairs(K)
        self.K = K
        self.variant = EstimatorVariant(variant)

    def posted_from_uniforms(self, pair_index: int, u_branch, u_price) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Posted (p, q) and seller-branch flags for uniforms in [0,1); works on arrays"""
        upper = float(self.grid.p[pair_index])
        p = float(self.grid.q[pair_index])
        h = 1.0 / self.K
        u_branch = np.asarray(u_branch, dtype=np.float64)
        u_price = np.asarray(u_price, dtype=np.float64)
        seller = u_branch < upper / (1.0 + h)
        seller_price = np.where(seller, u_price * upper, upper if self.variant is EstimatorVariant.CONSISTENT else p)
        buyer_price = np.where(seller, p, np.minimum(p + u_price * (1.0 - p), 1.0))
        return seller_price, buyer_price, seller

    def propose(self, pair_index: int, rng: np.random.Generator) -> Tuple[PricePair, str]:
        u_branch, u_price = rng.random(2)
        sp, bp, seller = self.posted_from_uniforms(pair_index, u_branch, u_price)
        return PricePair(float(sp), float(bp)), (BRANCH_SELLER if bool(seller) else BRANCH_BUYER)

    def estimate_with(self, pair_index: int, rng: np.random.Generator,
                      trade_bit: Callable[[PricePair], bool]) -> GftEstimate:
        """Post the probe through a one-bit channel and return its trade bit"""
        posted, branch = self.propose(pair_index, rng)
        return GftEstimate(value=int(bool(trade_bit(posted))), posted=posted, branch=branch)

    def estimate(self, pair_index: int, v: Valuation, rng: np.random.Generator) -> GftEstimate:
        return self.estimate_with(
            pair_index, rng, lambda pair: PayoffService.observe(pair, v, FeedbackModel.ONE_BIT).trade
        )

    def sample_values(self, pair_index: int, s: float, b: float, u_branch, u_price) -> np.ndarray:
        sp, bp, _ = self.posted_from_uniforms(pair_index, u_branch, u_price)
        return ((s <= sp) & (bp <= b)).astype(np.float64)

    @staticmethod
    def closed_form_mean(p: Fraction, K: int, s: Fraction, b: Fraction,
                         variant: EstimatorVariant = EstimatorVariant.CONSISTENT) -> Fraction:
        """Exact expectation of the estimate for the pair (p + 1/K, p)"""
        h = Fraction(1, K)
        p, s, b = Fraction(p), Fraction(s), Fraction(b)
        if not (s <= p + h and p <= b):
            return Fraction(0)
        if EstimatorVariant(variant) is EstimatorVariant.CONSISTENT:
            return (b - s + h) / (1 + h)
        buyer_side = (b - p) if s <= p else Fraction(0)
        return (p + h - s + buyer_side) / (1 + h)

    @staticmethod
    def target_gft(p: Fraction, K: int, s: Fraction, b: Fraction) -> Fraction:
        """GFT(p + 1/K, p) in exact arithmetic"""
        p, s, b = Fraction(p), Fraction(s), Fraction(b)
        if s <= p + Fraction(1, K) and p <= b:
            return b - s
        return Fraction(0)
