import math
from typing import List

import numpy as np

from app.models import (
    BudgetLedger,
    Feedback,
    FeedbackModel,
    FullFeedback,
    OneBitFeedback,
    PricePair,
    TwoBitFeedback,
    Valuation,
)
from app.models.sequence import ValuationSequence


class PayoffService:
    """Gain from trade, revenue, feasibility and feedback channels of the trade protocol"""

    @staticmethod
    def trades(p: float, q: float, s: float, b: float) -> bool:
        """Both agents accept; comparisons are inclusive so ties trade"""
        return s <= p and q <= b

    @staticmethod
    def gft(pair: PricePair, v: Valuation) -> float:
        """1{s <= p} 1{q <= b} (b - s)"""
        if PayoffService.trades(pair.p, pair.q, v.s, v.b):
            return v.b - v.s
        return 0.0

    @staticmethod
    def rev(pair: PricePair, v: Valuation) -> float:
        """1{s <= p} 1{q <= b} (q - p)"""
        if PayoffService.trades(pair.p, pair.q, v.s, v.b):
            return pair.q - pair.p
        return 0.0

    @staticmethod
    def feasible(pair: PricePair, ledger: BudgetLedger) -> bool:
        """Exact comparison p - q <= B_{t-1}, no slack"""
        return pair.p - pair.q <= ledger.current

    @staticmethod
    def observe(pair: PricePair, v: Valuation, model: FeedbackModel) -> Feedback:
        model = FeedbackModel(model)
        seller = v.s <= pair.p
        buyer = pair.q <= v.b
        if model is FeedbackModel.FULL:
            return FullFeedback(v.s, v.b)
        if model is FeedbackModel.TWO_BIT:
            return TwoBitFeedback(seller, buyer)
        return OneBitFeedback(seller and buyer)

    # Vectorized forms over many price pairs for a single valuation

    @staticmethod
    def gft_vector(p: np.ndarray, q: np.ndarray, s: float, b: float) -> np.ndarray:
        trade = (s <= p) & (q <= b)
        return np.where(trade, b - s, 0.0)

    @staticmethod
    def rev_vector(p: np.ndarray, q: np.ndarray, s: float, b: float) -> np.ndarray:
        trade = (s <= p) & (q <= b)
        return np.where(trade, q - p, 0.0)

    # Totals over a whole sequence

    @staticmethod
    def total_per_pair(seq: ValuationSequence, p: np.ndarray, q: np.ndarray, objective: str = "gft") -> List[float]:
        """
        Correctly rounded totals sum_t GFT_t(p_i, q_i) (or REV) for every pair i.

        Uses math.fsum per pair so equal real-valued totals compare equal.
        """
        if objective not in ("gft", "rev"):
            raise ValueError(f"Unknown objective: {objective}")
        p = np.asarray(p, dtype=np.float64)
        q = np.asarray(q, dtype=np.float64)
        s = seq.s[None, :]
        b = seq.b[None, :]
        totals: List[float] = []
        # chunk the pair axis to bound the temporary matrix
        chunk = max(1, 2_000_000 // max(1, len(seq)))
        for start in range(0, p.shape[0], chunk):
            pc = p[start:start + chunk, None]
            qc = q[start:start + chunk, None]
            trade = (s <= pc) & (qc <= b)
            if objective == "gft":
                values = np.where(trade, b - s, 0.0)
            else:
                values = np.where(trade, qc - pc, 0.0)
            totals.extend(math.fsum(row) for row in values.tolist())
        return totals

    @staticmethod
    def total(seq: ValuationSequence, pair: PricePair, objective: str = "gft") -> float:
        return PayoffService.total_per_pair(seq, np.array([pair.p]), np.array([pair.q]), objective)[0]
