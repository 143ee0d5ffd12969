from pydantic import BaseModel, Field
from typing import List, Literal, Optional, Tuple

from app.schemas.benchmark import HindsightReport
from app.schemas.simulation import RunSummary

Family = Literal["iid", "full-lb", "twobit-lb", "gap", "alpha-lb"]


class ValuationPoint(BaseModel):
    s: float = Field(..., ge=0.0, le=1.0)
    b: float = Field(..., ge=0.0, le=1.0)


class DistributionSpec(BaseModel):
    """Finite valuation law given point by point"""

    support: List[ValuationPoint] = Field(..., min_length=1)
    probs: List[float] = Field(..., min_length=1)


class AdversarySpec(BaseModel):
    """
    Which valuation sequence to generate.

    `iid` samples `distribution` when given and independent uniforms otherwise.
    `twobit-lb` uses N, k and eps; `gap` uses eps; `alpha-lb` emits S2 unless
    `alpha_variant` is "S1".
    """

    family: Family = "iid"
    distribution: Optional[DistributionSpec] = None
    N: Optional[int] = Field(None, gt=32)
    k: int = Field(0, ge=0)
    eps: Optional[float] = Field(None, gt=0)
    w5_upper: bool = True
    alpha_variant: Literal["S1", "S2"] = "S2"


class FullLBCase(BaseModel):
    region: str
    p: str
    q: str
    expected_gft: str = Field(..., description="Exact per-round expected GFT at the representative pair")
    closed_form: str
    matches: bool


class FullLBCaseTable(BaseModel):
    cases: List[FullLBCase]
    probe_size: int
    probe_max: str = Field(..., description="Largest per-round expected GFT over the probe grid")


class MonteCarloCheck(BaseModel):
    name: str
    reps: int
    mean: float
    std_err: float
    target: float
    passed: bool = Field(..., description="One-sided: mean + 3 std_err >= target")


class GapMixtureReport(BaseModel):
    epsilon: str
    T: int
    alpha: str
    expected_revenue: str
    expected_gft: str
    fixed_price_value: str
    ratio: float
    ratio_floor: float
    holds: bool


class AlphaReferenceMixture(BaseModel):
    most_frequent: Tuple[float, float]
    expected_gft: str
    expected_revenue: str
    gft_floor: str
    holds: bool


class AlphaLBRun(BaseModel):
    name: Literal["S1", "S2"]
    summary: RunSummary
    benchmarks: HindsightReport


class AlphaLBReport(BaseModel):
    T: int
    feedback: Literal["full", "one-bit"]
    runs: List[AlphaLBRun]
    reference: AlphaReferenceMixture


class EmitRequest(BaseModel):
    adversary: AdversarySpec = Field(default_factory=AdversarySpec)
    T: int = Field(..., ge=1)
    seed: Optional[int] = Field(None, description="Defaults to DEFAULT_MASTER_SEED")


class EmitResponse(BaseModel):
    family: Family
    T: int
    seed: int
    s: List[float]
    b: List[float]
