from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.models.market import Valuation

ExactPoint = Tuple[Fraction, Fraction, Fraction]  # (s, b, mass)


@dataclass(frozen=True, eq=False)
class FiniteValuationDistribution:
    """
    Finitely supported law over [0,1]^2.

    When built from exact rationals, `exact` keeps (s, b, mass) so validity
    checks and expectations can be done without rounding.
    """

    s: np.ndarray
    b: np.ndarray
    probs: np.ndarray
    exact: Optional[Tuple[ExactPoint, ...]] = None
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if not (self.s.shape == self.b.shape == self.probs.shape) or self.s.ndim != 1 or self.s.size == 0:
            raise ValueError("support and probabilities must be nonempty vectors of equal length")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(float(self.probs.sum()) - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {float(self.probs.sum())!r}")
        if np.any((self.s < 0) | (self.s > 1) | (self.b < 0) | (self.b > 1)):
            raise ValueError("support points must lie in [0,1]^2")
        for arr in (self.s, self.b, self.probs):
            arr.setflags(write=False)

    @classmethod
    def from_exact(cls, points: Sequence[ExactPoint], labels: Optional[Sequence[str]] = None) -> "FiniteValuationDistribution":
        pts = tuple((Fraction(s), Fraction(b), Fraction(m)) for s, b, m in points)
        return cls(
            s=np.array([float(p[0]) for p in pts]),
            b=np.array([float(p[1]) for p in pts]),
            probs=np.array([float(p[2]) for p in pts]),
            exact=pts,
            labels=tuple(labels) if labels is not None else None,
        )

    @classmethod
    def point_mass(cls, s: float, b: float) -> "FiniteValuationDistribution":
        return cls(np.array([float(s)]), np.array([float(b)]), np.array([1.0]))

    @property
    def support(self) -> List[Valuation]:
        return [Valuation(float(s), float(b)) for s, b in zip(self.s, self.b)]

    def __len__(self) -> int:
        return int(self.s.shape[0])

    def __repr__(self):
        return f"<FiniteValuationDistribution(size={len(self)}, exact={self.exact is not None})>"
