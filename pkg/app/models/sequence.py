from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

import numpy as np

from app.models.market import Valuation


@dataclass(frozen=True, eq=False)
class ValuationSequence:
    """Oblivious adversary input: one (s_t, b_t) per round"""

    s: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.s.shape != self.b.shape or self.s.ndim != 1:
            raise ValueError("s and b must be one-dimensional arrays of equal length")
        for name, col in (("s", self.s), ("b", self.b)):
            if col.size and (np.isnan(col).any() or col.min() < 0.0 or col.max() > 1.0):
                raise ValueError(f"valuation column {name} must lie in [0,1]")
        self.s.setflags(write=False)
        self.b.setflags(write=False)

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, float]]) -> "ValuationSequence":
        arr = np.asarray(list(pairs), dtype=np.float64).reshape(-1, 2)
        return cls(arr[:, 0].copy(), arr[:, 1].copy())

    @classmethod
    def from_arrays(cls, s, b) -> "ValuationSequence":
        return cls(np.array(s, dtype=np.float64), np.array(b, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.s.shape[0])

    def __iter__(self) -> Iterator[Valuation]:
        for s, b in zip(self.s.tolist(), self.b.tolist()):
            yield Valuation(s, b)

    def __getitem__(self, index: int) -> Valuation:
        return Valuation(float(self.s[index]), float(self.b[index]))

    def as_pairs(self):
        return list(zip(self.s.tolist(), self.b.tolist()))

    def __repr__(self):
        return f"<ValuationSequence(T={len(self)})>"
