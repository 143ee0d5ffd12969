from dataclasses import dataclass
from enum import Enum
from typing import Union


def _check_unit(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0,1], got {value!r}")


class FeedbackModel(str, Enum):
    FULL = "full"
    TWO_BIT = "two-bit"
    ONE_BIT = "one-bit"


@dataclass(frozen=True)
class Valuation:
    """Seller and buyer valuations for one round; s > b is allowed"""

    s: float
    b: float

    def __post_init__(self):
        _check_unit("s", self.s)
        _check_unit("b", self.b)


@dataclass(frozen=True)
class PricePair:
    """Price p posted to the seller and q posted to the buyer"""

    p: float
    q: float

    def __post_init__(self):
        _check_unit("p", self.p)
        _check_unit("q", self.q)

    @property
    def deficit(self) -> float:
        return self.p - self.q

    def __repr__(self):
        return f"<PricePair(p={self.p}, q={self.q})>"


@dataclass(frozen=True)
class FullFeedback:
    s: float
    b: float


@dataclass(frozen=True)
class TwoBitFeedback:
    seller_accepts: bool
    buyer_accepts: bool

    @property
    def trade(self) -> bool:
        return self.seller_accepts and self.buyer_accepts


@dataclass(frozen=True)
class OneBitFeedback:
    trade: bool


Feedback = Union[FullFeedback, TwoBitFeedback, OneBitFeedback]
