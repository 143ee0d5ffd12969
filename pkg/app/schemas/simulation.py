import math
from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Literal, Optional, Tuple

from app.services.learners.gft_estimator import EstimatorVariant


def ceil_root(value: int, degree: int) -> int:
    """Smallest integer x >= 1 with x**degree >= value, in integer arithmetic"""
    if value <= 1:
        return 1
    x = max(1, int(round(value ** (1.0 / degree))))
    while x ** degree < value:
        x += 1
    while x > 1 and (x - 1) ** degree >= value:
        x -= 1
    return x


class LearnerConfig(BaseModel):
    """Overrides for the revenue learner A_R and the GFT learner A_G"""

    hedge_eta_revenue: Optional[float] = Field(None, gt=0)
    hedge_eta_gft: Optional[float] = Field(None, gt=0)
    exp3p_delta: Optional[float] = Field(None, gt=0, lt=1, description="Defaults to 1/T")
    exp3p_gamma: Optional[float] = Field(None, ge=0, le=1)
    exp3p_alpha: Optional[float] = Field(None, gt=0)
    revenue_range: Tuple[float, float] = Field((0.0, 1.0), description="Declared range of revenue-grid rewards")
    estimator_variant: EstimatorVariant = EstimatorVariant.CONSISTENT

    @field_validator("revenue_range")
    @classmethod
    def validate_range(cls, v):
        if not v[0] < v[1]:
            raise ValueError("revenue_range must satisfy lo < hi")
        return v


class GftMaxConfig(BaseModel):
    feedback: Literal["full", "one-bit"]
    T: int = Field(..., ge=1)
    beta: float = Field(..., gt=0, description="Budget threshold ending the revenue phase")
    K: int = Field(..., ge=1, description="Resolution of the adjacent-pair grid H_K and revenue grid F_K")
    N: Optional[int] = Field(None, ge=1, description="Block count (one-bit feedback)")
    seed: int = 0
    learners: LearnerConfig = Field(default_factory=LearnerConfig)

    @model_validator(mode="after")
    def validate_blocks(self):
        if self.feedback == "one-bit" and self.N is None:
            raise ValueError("one-bit feedback needs a block count N")
        return self

    @classmethod
    def preset(cls, feedback: str, T: int, seed: int = 0, **overrides) -> "GftMaxConfig":
        """beta = K = ceil(sqrt T) for full feedback; beta = ceil(T^3/4), K = ceil(T^1/4), N = ceil(sqrt T) for one-bit"""
        if feedback == "full":
            k = ceil_root(T, 2)
            params = dict(beta=float(k), K=k)
        elif feedback == "one-bit":
            params = dict(beta=float(ceil_root(T ** 3, 4)), K=ceil_root(T, 4), N=ceil_root(T, 2))
        else:
            raise ValueError(f"Unknown feedback preset: {feedback}")
        params.update(overrides)
        return cls(feedback=feedback, T=T, seed=seed, **params)


class RunSummary(BaseModel):
    config: GftMaxConfig
    T: int
    tau: Optional[int] = Field(None, description="Round at which the budget reached beta; None if never")
    phase_two_reached: bool
    total_gft: float
    total_rev: float
    best_fixed_price: float
    best_fixed_price_value: float
    regret: float
    budget_final: float
    budget_min: float
    exploration_rounds: int = 0
    bound_value: float
    bound_vacuous: bool
    log_base: Literal["e", "2"] = "e"

    @property
    def budget_balanced(self) -> bool:
        return self.budget_final >= 0.0 and not math.isnan(self.budget_final)
