from pydantic import BaseModel, Field
from typing import Dict, List, Literal, Optional, Tuple

from app.schemas.verification import CheckResult


class DiscretizationReport(BaseModel):
    """Both sides of one discretization inequality on one sequence"""

    name: Literal["additive", "doubled-price", "multiplicative"]
    K: int
    T: int
    lhs: float = Field(..., description="Best fixed price total GFT")
    grid_value: float = Field(..., description="Best value attained on the grid")
    rhs: float = Field(..., description="Right-hand side of the inequality")
    slack: float = Field(..., description="rhs - lhs")
    holds: bool
    log_base: Optional[Literal["e", "2"]] = None
    min_pair_revenue: Optional[float] = Field(None, description="Worst total revenue over H_K pairs")
    revenue_floor: Optional[float] = None
    max_pair_trades: Optional[int] = Field(None, description="Most trades made by a single H_K pair")
    revenue_holds: Optional[bool] = None
    rhs_by_base: Optional[Dict[str, float]] = Field(None, description="Right-hand side per log base")
    holds_by_base: Optional[Dict[str, bool]] = None


class TwoBitStructureReport(BaseModel):
    """Exact structural checks of one two-bit lower-bound instance"""

    N: int
    k: int
    epsilon: str
    w5_buyer: str = Field(..., description="Buyer coordinate of the single W5 point")
    grid_shape: Tuple[int, int]
    gamma_1: str
    gamma_4: str
    gamma_5: str
    gamma_6: str
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed or c.informational for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)
