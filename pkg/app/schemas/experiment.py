from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Dict, List, Literal, Optional

from app.config import settings
from app.schemas.adversary import AdversarySpec
from app.schemas.benchmark import HindsightReport, SequenceIn
from app.schemas.simulation import LearnerConfig, RunSummary


class ExperimentConfig(BaseModel):
    """A regret-curve experiment: one preset, one adversary family, several horizons"""

    algo: Literal["full", "one-bit"] = "full"
    adversary: AdversarySpec = Field(default_factory=AdversarySpec)
    horizons: List[int] = Field(..., min_length=1)
    replications: int = Field(1, ge=1)
    master_seed: int = Field(default_factory=lambda: settings.DEFAULT_MASTER_SEED)
    learners: LearnerConfig = Field(default_factory=LearnerConfig)
    save_traces: bool = False
    out_dir: Optional[str] = Field(None, description="Artifact directory; defaults under STORAGE_PATH")
    name: str = "experiment"
    workers: Optional[int] = Field(None, ge=1)
    check_bound: bool = True

    @field_validator("algo", mode="before")
    @classmethod
    def normalize_algo(cls, v):
        return "one-bit" if v in ("onebit", "one_bit") else v

    @field_validator("horizons")
    @classmethod
    def validate_horizons(cls, v):
        if any(t < 1 for t in v):
            raise ValueError("horizons must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("horizons must be strictly increasing")
        return v


class ReplicationResult(BaseModel):
    T: int
    index: int
    adversary_seed: int
    algorithm_seed: int
    summary: Optional[RunSummary] = None
    error: Optional[str] = Field(None, description="Diagnostic of an aborted replication")
    trace_path: Optional[str] = None

    @property
    def aborted(self) -> bool:
        return self.error is not None


class HorizonResult(BaseModel):
    T: int
    replications: int
    completed: int
    aborted: int = 0
    mean_regret: float
    std_regret: float
    mean_budget: float
    min_budget: float
    no_phase_two_fraction: float = Field(..., description="Share of runs where the budget never reached beta")
    mean_total_gft: float
    mean_best_fixed_price: float
    bound_value: float
    bound_vacuous: bool
    bound_holds: Optional[bool] = Field(None, description="mean regret <= bound; None when the bound is vacuous")


class SlopeFit(BaseModel):
    slope: float
    intercept: float
    std_err: float
    ci_low: float
    ci_high: float
    horizons: List[int]


class AggregateResult(BaseModel):
    name: str
    algo: Literal["full", "one-bit"]
    family: str
    master_seed: int
    horizons: List[HorizonResult]
    slope: Optional[SlopeFit] = None
    aborted: int = 0
    artifacts: Dict[str, str] = {}

    @property
    def ok(self) -> bool:
        return self.aborted == 0 and all(h.bound_holds is not False for h in self.horizons)


class SimulationRequest(BaseModel):
    """A single GFT-Max run, on an inline sequence or a generated one"""

    algo: Literal["full", "one-bit"] = "full"
    T: Optional[int] = Field(None, ge=1, description="Required with a generated adversary")
    sequence: Optional[SequenceIn] = None
    adversary: Optional[AdversarySpec] = None
    seed: int = Field(default_factory=lambda: settings.DEFAULT_MASTER_SEED)
    learners: LearnerConfig = Field(default_factory=LearnerConfig)
    include_benchmarks: bool = False

    @field_validator("algo", mode="before")
    @classmethod
    def normalize_algo(cls, v):
        return "one-bit" if v in ("onebit", "one_bit") else v

    @model_validator(mode="after")
    def validate_source(self):
        if (self.sequence is None) == (self.adversary is None):
            raise ValueError("give exactly one of sequence or adversary")
        if self.adversary is not None and self.T is None:
            raise ValueError("T is required with a generated adversary")
        return self


class SimulationResponse(BaseModel):
    summary: RunSummary
    adversary_seed: Optional[int] = None
    algorithm_seed: int
    benchmarks: Optional[HindsightReport] = None
