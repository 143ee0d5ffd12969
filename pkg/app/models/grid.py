from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from app.models.market import PricePair


class GridKind(str, Enum):
    UNIFORM = "uniform"
    ADJACENT_PAIRS = "pairs"
    REVENUE = "revenue"


@dataclass(frozen=True, eq=False)
class PriceGrid:
    """
    Finite ordered set of price pairs.

    Uniform grids store diagonal pairs (x, x). Coordinates are rendered to
    float from exact rationals and the arrays are read-only.
    """

    kind: GridKind
    K: int
    p: np.ndarray
    q: np.ndarray
    T: Optional[int] = None

    def __post_init__(self):
        self.p.setflags(write=False)
        self.q.setflags(write=False)

    def __len__(self) -> int:
        return int(self.p.shape[0])

    def pair(self, index: int) -> PricePair:
        return PricePair(float(self.p[index]), float(self.q[index]))

    @property
    def pairs(self) -> List[PricePair]:
        return [self.pair(i) for i in range(len(self))]

    def __repr__(self):
        return f"<PriceGrid(kind={self.kind.value}, K={self.K}, T={self.T}, size={len(self)})>"
