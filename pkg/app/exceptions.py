from typing import Optional


class BilateralTradeError(Exception):
    """Base class for every error raised by the simulation library"""


class ConfigurationError(BilateralTradeError, ValueError):
    """Invalid parameters (grid sizes, horizons, ranges, block layout)"""


class ConstructionError(BilateralTradeError, ValueError):
    """A lower-bound instance could not be built from its parameters"""


class RewardRangeError(BilateralTradeError, ValueError):
    """A learner received a reward outside its declared range"""


class SequenceFormatError(BilateralTradeError, ValueError):
    """A valuation sequence file is malformed or out of [0,1]"""


class InfeasiblePostError(BilateralTradeError, RuntimeError):
    """A price pair violating p - q <= B_{t-1} was about to be posted"""

    def __init__(self, round_index: int, p: float, q: float, budget: float, phase: Optional[str] = None):
        self.round_index = round_index
        self.p = p
        self.q = q
        self.budget = budget
        self.phase = phase
        super().__init__(
            f"Infeasible post at round {round_index} (phase {phase or '?'}): "
            f"p={p!r}, q={q!r}, p-q={p - q!r} exceeds budget {budget!r}"
        )
