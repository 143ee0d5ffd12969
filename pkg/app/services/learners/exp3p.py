import math
from typing import Optional, Tuple

import numpy as np

from app.exceptions import ConfigurationError
from app.services.learners.hedge import ActionDistribution, check_reward_range, rescale


class Exp3P:
    """
    EXP3.P bandit (Auer, Cesa-Bianchi, Freund and Schapire, 2002).

    gamma = min(3/5, 2 sqrt(3 n ln n / (5T))), alpha = 2 sqrt(ln(nT/delta)).
    Probabilities mix gamma uniform mass into the exponential weights; the
    update adds the importance-weighted reward plus the optimistic bias
    alpha / (p_j sqrt(nT)) to every arm, scaled by gamma / (3n).
    """

    def __init__(self, n: int, T: int, delta: Optional[float] = None,
                 reward_range: Tuple[float, float] = (0.0, 1.0),
                 gamma: Optional[float] = None, alpha: Optional[float] = None):
        if n < 1:
            raise ConfigurationError(f"EXP3.P needs at least one arm, got n={n}")
        if T < 1:
            raise ConfigurationError(f"EXP3.P needs a positive horizon, got T={T}")
        self.n = int(n)
        self.T = int(T)
        self.delta = float(delta) if delta is not None else 1.0 / T
        if not 0.0 < self.delta < 1.0 and T > 1:
            raise ConfigurationError(f"Confidence delta must lie in (0,1), got {self.delta}")
        self.lo, self.hi = check_reward_range(reward_range)

        if gamma is None:
            gamma = min(0.6, 2.0 * math.sqrt(0.6 * n * math.log(n) / T)) if n > 1 else 0.0
        if alpha is None:
            alpha = 2.0 * math.sqrt(math.log(n * T / self.delta))
        self.gamma = float(gamma)
        self.alpha = float(alpha)
        self.eta = self.gamma / (3.0 * n)
        self.beta_mix = self.alpha / math.sqrt(n * T)
        # common initial log-weight alpha*gamma/3*sqrt(T/n); only differences matter
        self._log_weights = np.full(self.n, self.alpha * self.gamma / 3.0 * math.sqrt(T / n))
        self.estimated_gains = np.zeros(self.n)
        self._last_probs: Optional[np.ndarray] = None

    def probabilities(self) -> np.ndarray:
        w = np.exp(self._log_weights - self._log_weights.max())
        return (1.0 - self.gamma) * (w / w.sum()) + self.gamma / self.n

    def recommend(self) -> ActionDistribution:
        return ActionDistribution(self.probabilities())

    def sample(self, rng: np.random.Generator) -> int:
        probs = self.probabilities()
        self._last_probs = probs
        return ActionDistribution(probs).sample(rng)

    def update(self, action: int, reward: float) -> None:
        if not isinstance(action, (int, np.integer)) or not 0 <= action < self.n:
            raise ConfigurationError(f"Invalid arm index {action!r} for {self.n} arms")
        probs = self._last_probs if self._last_probs is not None else self.probabilities()
        x = float(rescale(np.array([reward], dtype=np.float64), self.lo, self.hi)[0])
        gains = self.beta_mix / probs
        gains[action] += x / probs[action]
        self.estimated_gains += gains
        self._log_weights += self.eta * gains
        self._log_weights -= self._log_weights.max()
        self._last_probs = None

    def __repr__(self):
        return f"<Exp3P(n={self.n}, T={self.T}, gamma={self.gamma:.4g}, alpha={self.alpha:.4g})>"
