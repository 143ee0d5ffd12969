from pydantic import BaseModel, Field
from typing import List, Literal, Optional, Tuple

Suite = Literal["discretization", "estimator", "budget", "benchmarks", "lb-structure", "slopes", "all"]


class CheckResult(BaseModel):
    """One named comparison with both sides kept for the record"""

    name: str
    passed: bool
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    exact_lhs: Optional[str] = Field(None, description="Exact rational value when available")
    exact_rhs: Optional[str] = None
    detail: str = ""
    informational: bool = Field(False, description="Reported but never fails the suite")


class SuiteResult(BaseModel):
    suite: str
    checks: List[CheckResult] = []

    @property
    def failed(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed and not c.informational]

    @property
    def passed(self) -> bool:
        return not self.failed


class VerifyReport(BaseModel):
    seed: int
    suites: List[SuiteResult] = []

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def summary(self) -> dict:
        total = sum(len(s.checks) for s in self.suites)
        failed = sum(len(s.failed) for s in self.suites)
        return {"seed": self.seed, "checks": total, "failed": failed, "passed": self.passed}


class VerifyScale(BaseModel):
    """Sizes of the verification workloads; the defaults are the full acceptance scale"""

    discretization_sequences: int = Field(500, ge=1)
    discretization_cases: List[Tuple[int, int]] = [(64, 4), (100, 7), (200, 10)]
    estimator_Ks: List[int] = [4, 10, 50]
    estimator_samples_log2: int = Field(17, ge=4, le=24)
    budget_runs: int = Field(1000, ge=1)
    budget_T: int = Field(10_000, ge=4)
    benchmark_sequences: int = Field(500, ge=1)
    benchmark_max_T: int = Field(200, ge=2)
    bruteforce_sequences: int = Field(200, ge=1)
    bruteforce_max_T: int = Field(12, ge=1)
    gap_eps: List[float] = [0.1, 0.05, 0.01]
    gap_T: int = Field(200, ge=2)
    alpha_T: int = Field(100, ge=4)
    alpha_seeds: int = Field(20, ge=1)
    lb_Ns: List[int] = [33, 64, 128]
    lb_w3_range: Tuple[int, int] = (33, 256)
    full_lb_T: int = Field(400, ge=1)
    full_lb_reps: int = Field(10_000, ge=2)
    walk_lengths: List[int] = [1, 2, 3, 10, 100, 1000, 10_000]
    slope_horizons: List[int] = [256, 1024, 4096, 16384]
    slope_reps: int = Field(50, ge=1)
    slope_enforced: bool = Field(True, description="Slope thresholds fail the suite; off, they are only reported")

    @classmethod
    def quick(cls) -> "VerifyScale":
        return cls(
            discretization_sequences=15, estimator_Ks=[4, 10], estimator_samples_log2=14,
            budget_runs=2, budget_T=1024, benchmark_sequences=25, bruteforce_sequences=20,
            alpha_seeds=3, lb_Ns=[33], lb_w3_range=(33, 40), full_lb_reps=2000,
            slope_horizons=[256, 512, 1024, 2048], slope_reps=4, slope_enforced=False,
        )
