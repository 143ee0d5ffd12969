import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from app.exceptions import ConfigurationError, RewardRangeError

logger = logging.getLogger(__name__)

# relative slack for float rounding in payoffs such as b - s on adjacent pairs
RANGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ActionDistribution:
    """Probability vector over a finite action set"""

    probs: np.ndarray

    def sample(self, rng: np.random.Generator) -> int:
        cdf = np.cumsum(self.probs)
        idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        return min(idx, self.probs.shape[0] - 1)

    def __len__(self) -> int:
        return int(self.probs.shape[0])


def check_reward_range(reward_range: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = float(reward_range[0]), float(reward_range[1])
    if not lo < hi:
        raise ConfigurationError(f"Degenerate reward range [{lo}, {hi}]")
    return lo, hi


def rescale(rewards: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Affine map [lo, hi] -> [0, 1]; anything beyond rounding slack is a payoff bug"""
    slack = RANGE_TOLERANCE * (hi - lo)
    if np.any(rewards < lo - slack) or np.any(rewards > hi + slack) or np.any(np.isnan(rewards)):
        raise RewardRangeError(
            f"Reward outside declared range [{lo}, {hi}]: min={np.nanmin(rewards)!r}, max={np.nanmax(rewards)!r}"
        )
    return np.clip((rewards - lo) / (hi - lo), 0.0, 1.0)


class Hedge:
    """
    Exponential weights with full feedback.

    Weights are kept as log-weights proportional to eta times the cumulative
    rescaled reward, shifted by their maximum after every update so they
    survive 10^6 rounds without overflow or underflow.
    """

    def __init__(self, n: int, T: int, reward_range: Tuple[float, float] = (0.0, 1.0), eta: Optional[float] = None):
        if n < 1:
            raise ConfigurationError(f"Hedge needs at least one action, got n={n}")
        if T < 1:
            raise ConfigurationError(f"Hedge needs a positive horizon, got T={T}")
        self.n = int(n)
        self.T = int(T)
        self.lo, self.hi = check_reward_range(reward_range)
        if eta is None:
            eta = math.sqrt(math.log(n) / T) if n > 1 else math.sqrt(1.0 / T)
        if eta <= 0:
            raise ConfigurationError(f"Hedge learning rate must be positive, got {eta}")
        self.eta = float(eta)
        self.cumulative = np.zeros(self.n)
        self._log_weights = np.zeros(self.n)
        self.updates = 0

    def recommend(self) -> ActionDistribution:
        w = np.exp(self._log_weights - self._log_weights.max())
        return ActionDistribution(w / w.sum())

    def sample(self, rng: np.random.Generator) -> int:
        return self.recommend().sample(rng)

    def update(self, rewards: Sequence[float]) -> None:
        rewards = np.asarray(rewards, dtype=np.float64)
        if rewards.shape != (self.n,):
            raise ConfigurationError(f"Reward vector must have length {self.n}, got shape {rewards.shape}")
        scaled = rescale(rewards, self.lo, self.hi)
        self.cumulative += scaled
        self._log_weights += self.eta * scaled
        self._log_weights -= self._log_weights.max()
        self.updates += 1

    def __repr__(self):
        return f"<Hedge(n={self.n}, T={self.T}, eta={self.eta:.6g}, updates={self.updates})>"
