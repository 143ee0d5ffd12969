from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from app.exceptions import ConstructionError

Rational = Union[Fraction, int, str, float]

L = Fraction(1, 12)
RHO = Fraction(1, 32)
GAMMA_5 = Fraction(1, 64)


@dataclass(frozen=True)
class TwoBitLBParams:
    """
    Parameters of the two-bit lower-bound instance family, all exact.

    Instance k = 0 is the base law; instance k >= 1 moves epsilon of mass
    between the two high-buyer sets at indices k and k+1.
    """

    N: int
    k: int
    epsilon: Fraction
    w5_upper: bool
    Delta: Fraction
    delta: Fraction
    gamma_1: Fraction
    gamma_3: Tuple[Fraction, ...]
    gamma_4: Fraction
    gamma_6: Fraction
    l: Fraction = L
    rho: Fraction = RHO
    gamma_5: Fraction = GAMMA_5

    @classmethod
    def build(cls, N: int, k: int = 0, epsilon: Optional[Rational] = None, w5_upper: bool = True) -> "TwoBitLBParams":
        if N <= 32:
            raise ConstructionError(f"The instance family needs N > 32, got N={N}")
        if not 0 <= k <= N - 2:
            raise ConstructionError(f"Instance index k must lie in 0..{N - 2}, got k={k}")
        gamma_1 = Fraction(1, 64 * N * N)
        eps = gamma_1 / 2 if epsilon is None else _exact(epsilon)
        if not 0 < eps <= gamma_1:
            raise ConstructionError(f"Need 0 < epsilon <= gamma_1 = {gamma_1}, got {eps}")

        Delta = L / (N - 1)
        delta = Delta / 2
        gamma_3 = tuple(
            gamma_1 * (1 - L - RHO - 2 * i * Delta) / ((1 - L) / 2 - delta + i * Delta)
            for i in range(N)
        )
        gamma_4 = 4 * gamma_1 * (13 * N - 14)
        gamma_6 = (1 - (2 * gamma_1 * N + sum(gamma_3) + N * gamma_4 + GAMMA_5)) / 4
        if gamma_6 < 0:
            raise ConstructionError(f"Corner mass gamma_6 = {gamma_6} is negative")
        return cls(
            N=N, k=k, epsilon=eps, w5_upper=w5_upper, Delta=Delta, delta=delta,
            gamma_1=gamma_1, gamma_3=gamma_3, gamma_4=gamma_4, gamma_6=gamma_6,
        )

    def seller(self, i: int) -> Fraction:
        """Seller coordinate s_i = (1-l)/2 + i*Delta of the high-buyer sets"""
        return (1 - self.l) / 2 + i * self.Delta

    @property
    def w5_buyer(self) -> Fraction:
        return (1 + self.l) / 2 if self.w5_upper else (1 - self.l) / 2

    @property
    def band(self) -> Tuple[Fraction, Fraction]:
        return (1 - self.l) / 2, (1 + self.l) / 2

    def strip(self, j: int) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """F_j = [s_j, s_{j+1}) x (1-l-rho, 1-l] as (p_lo, p_hi, q_lo, q_hi)"""
        return self.seller(j), self.seller(j + 1), 1 - self.l - self.rho, 1 - self.l

    @property
    def c_values(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        """Closed-form plateaus of E_0[GFT(p, p+delta)] across the four price bands"""
        corner = self.gamma_6
        c2 = corner + self.gamma_1 * Fraction(77, 96) * self.N
        c1 = self.gamma_5 * (1 + self.l) / 2 + c2
        c3 = corner + self.gamma_1 * Fraction(5, 12) * self.N
        return c1, c2, c3, corner


def _exact(value: Rational) -> Fraction:
    # floats go through their shortest repr so 1e-6 means 1/10**6
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)
