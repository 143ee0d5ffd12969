import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

PHASE_REVENUE = 1
PHASE_GFT = 2
PHASE_LABELS = {PHASE_REVENUE: "I", PHASE_GFT: "II"}

TRACE_COLUMNS = ("t", "phase", "p", "q", "s", "b", "gft", "rev", "budget")


@dataclass(eq=False)
class RunTrace:
    """Per-round record of one GFT-Max run; tau is None when phase II was never reached"""

    phase: np.ndarray
    p: np.ndarray
    q: np.ndarray
    s: np.ndarray
    b: np.ndarray
    gft: np.ndarray
    rev: np.ndarray
    budget: np.ndarray
    tau: Optional[int] = None

    def __len__(self) -> int:
        return int(self.phase.shape[0])

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def total_gft(self) -> float:
        return math.fsum(self.gft.tolist())

    @property
    def total_rev(self) -> float:
        return math.fsum(self.rev.tolist())

    @property
    def budget_final(self) -> float:
        return float(self.budget[-1]) if len(self) else 0.0

    @property
    def phase_two_reached(self) -> bool:
        return self.tau is not None and self.tau < len(self)


class TraceRecorder:
    """Preallocated column buffers filled round by round"""

    def __init__(self, horizon: int):
        self.horizon = horizon
        self._phase = np.zeros(horizon, dtype=np.int8)
        self._cols = {name: np.zeros(horizon, dtype=np.float64) for name in TRACE_COLUMNS[2:]}
        self._n = 0

    def record(self, phase: int, p: float, q: float, s: float, b: float,
               gft: float, rev: float, budget: float) -> None:
        i = self._n
        self._phase[i] = phase
        cols = self._cols
        cols["p"][i] = p
        cols["q"][i] = q
        cols["s"][i] = s
        cols["b"][i] = b
        cols["gft"][i] = gft
        cols["rev"][i] = rev
        cols["budget"][i] = budget
        self._n += 1

    def finish(self, tau: Optional[int]) -> RunTrace:
        n = self._n
        return RunTrace(
            phase=self._phase[:n].copy(),
            tau=tau,
            **{name: col[:n].copy() for name, col in self._cols.items()},
        )
