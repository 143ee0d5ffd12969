from app.models.market import (
    FeedbackModel,
    Feedback,
    FullFeedback,
    OneBitFeedback,
    PricePair,
    TwoBitFeedback,
    Valuation,
)
from app.models.ledger import BudgetLedger
from app.models.sequence import ValuationSequence
from app.models.distribution import FiniteValuationDistribution
from app.models.grid import GridKind, PriceGrid
from app.models.trace import PHASE_GFT, PHASE_REVENUE, RunTrace, TraceRecorder

__all__ = [
    "FeedbackModel",
    "Feedback",
    "FullFeedback",
    "OneBitFeedback",
    "PricePair",
    "TwoBitFeedback",
    "Valuation",
    "BudgetLedger",
    "ValuationSequence",
    "FiniteValuationDistribution",
    "GridKind",
    "PriceGrid",
    "PHASE_GFT",
    "PHASE_REVENUE",
    "RunTrace",
    "TraceRecorder",
]
