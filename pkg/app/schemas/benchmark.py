from pydantic import BaseModel, Field, model_validator
from typing import List, Literal, Optional, Union

from app.models import ValuationSequence


class PriceQuote(BaseModel):
    p: float = Field(..., ge=0.0, le=1.0, description="Price posted to the seller")
    q: float = Field(..., ge=0.0, le=1.0, description="Price posted to the buyer")


class FixedPriceResult(BaseModel):
    price: float
    value: float = Field(..., description="Total GFT of posting (price, price) every round")


class GridPairResult(BaseModel):
    pair: PriceQuote
    value: float
    objective: Literal["gft", "rev"]


class MixedPriceStrategy(BaseModel):
    support: List[PriceQuote] = Field(..., min_length=1, max_length=2)
    weights: List[float]
    weights_exact: List[str] = Field(..., description="Mixing weights as exact fractions")
    value: float = Field(..., description="Expected total GFT")
    expected_revenue: float = Field(..., description="Expected total revenue, >= 0 when feasible")


class HindsightReport(BaseModel):
    T: int
    best_fixed_price: Optional[FixedPriceResult] = None
    best_distribution: Optional[MixedPriceStrategy] = None
    ratio: Optional[Union[float, Literal["undefined"]]] = None


class SequenceIn(BaseModel):
    """Valuation sequence sent inline as two equal-length columns"""

    s: List[float] = Field(..., min_length=1)
    b: List[float] = Field(..., min_length=1)

    @model_validator(mode="after")
    def validate_columns(self):
        if len(self.s) != len(self.b):
            raise ValueError("s and b must have the same length")
        if any(not 0.0 <= v <= 1.0 for v in self.s + self.b):
            raise ValueError("valuations must lie in [0,1]")
        return self

    def to_sequence(self) -> ValuationSequence:
        return ValuationSequence.from_arrays(self.s, self.b)
