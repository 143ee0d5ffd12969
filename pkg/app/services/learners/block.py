import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from app.exceptions import ConfigurationError
from app.models import PricePair
from app.services.learners.gft_estimator import EstimatorVariant, GftEstimate, GftEstimator
from app.services.learners.hedge import ActionDistribution, Hedge

logger = logging.getLogger(__name__)

# posts a pair to the environment and returns the one-bit trade outcome
PostCallback = Callable[[PricePair], bool]


@dataclass
class BlockRecord:
    index: int
    start: int
    end: int
    exploration: Dict[int, int] = field(default_factory=dict)  # round -> H_K pair index
    updated: bool = False


@dataclass(frozen=True)
class BlockStep:
    posted: PricePair
    explored_pair: Optional[int]
    estimate: Optional[GftEstimate]


class BlockDecomposition:
    """
    One-bit learner over H_K built from full-feedback Hedge.

    The horizon is cut into N contiguous blocks. Inside block j, |H_K| rounds
    drawn without replacement are matched to the pairs of H_K by a uniform
    bijection and answered with the GFT estimator; every other round plays a
    pair drawn from the block's fixed distribution x_j. The estimated reward
    vector feeds one Hedge update at the end of the block.
    """

    def __init__(self, T: int, N: int, K: int, rng: np.random.Generator,
                 variant: EstimatorVariant = EstimatorVariant.CONSISTENT,
                 allow_partial: bool = False):
        if T < 1 or N < 1:
            raise ConfigurationError(f"Block decomposition needs T >= 1 and N >= 1, got T={T}, N={N}")
        if N > T:
            raise ConfigurationError(f"More blocks than rounds: N={N}, T={T}")
        self.T, self.N, self.K = int(T), int(N), int(K)
        self.partial = T // N < K
        if self.partial and not (allow_partial and N == 1):
            raise ConfigurationError(
                f"Block of {T // N} rounds cannot hold one exploration round per pair of H_{K}"
            )
        self.estimator = GftEstimator(K, variant)
        self.grid = self.estimator.grid
        self.hedge = Hedge(K, N, (0.0, 1.0))
        # equal-as-possible contiguous blocks
        sizes = np.full(N, T // N)
        sizes[: T % N] += 1
        edges = np.concatenate(([0], np.cumsum(sizes)))
        self.bounds = [(int(edges[j]), int(edges[j + 1])) for j in range(N)]
        self.blocks: List[BlockRecord] = []
        self.j = 0
        self._x: Optional[ActionDistribution] = None
        self._r_hat: Optional[np.ndarray] = None
        self._start_block(rng)

    @classmethod
    def for_phase(cls, length: int, N: int, K: int, rng: np.random.Generator,
                  variant: EstimatorVariant = EstimatorVariant.CONSISTENT) -> "BlockDecomposition":
        """Fit the block count to a phase of the given length (at least one block)"""
        n_blocks = max(1, min(N, length // K))
        if n_blocks < N:
            logger.info("Phase of %d rounds uses %d blocks instead of %d", length, n_blocks, N)
        return cls(length, n_blocks, K, rng, variant, allow_partial=True)

    @property
    def exploration_rounds(self) -> int:
        return sum(len(rec.exploration) for rec in self.blocks)

    def _start_block(self, rng: np.random.Generator) -> None:
        start, end = self.bounds[self.j]
        size = end - start
        m = min(self.K, size)
        rounds = np.sort(rng.choice(size, size=m, replace=False))
        pairs = rng.permutation(self.K)[:m]
        record = BlockRecord(
            index=self.j, start=start, end=end,
            exploration={start + int(r): int(i) for r, i in zip(rounds, pairs)},
        )
        self.blocks.append(record)
        self._x = self.hedge.recommend()
        self._r_hat = np.full(self.K, np.nan)

    def step(self, t: int, rng: np.random.Generator, post: PostCallback) -> BlockStep:
        """Play round t (0-based within the phase) and close the block when it ends"""
        record = self.blocks[-1]
        if not record.start <= t < record.end:
            raise ConfigurationError(f"Round {t} is outside block {record.index} [{record.start}, {record.end})")

        pair_index = record.exploration.get(t)
        if pair_index is not None:
            estimate = self.estimator.estimate_with(pair_index, rng, post)
            self._r_hat[pair_index] = estimate.value
            result = BlockStep(estimate.posted, pair_index, estimate)
        else:
            a = self._x.sample(rng)
            pair = self.grid.pair(a)
            post(pair)
            result = BlockStep(pair, None, None)

        if t == record.end - 1:
            self._close_block(rng)
        return result

    def _close_block(self, rng: np.random.Generator) -> None:
        record = self.blocks[-1]
        if np.isnan(self._r_hat).any():
            # only a truncated single block can end with unexplored pairs
            logger.debug("Block %d ended with a partial reward vector; skipping update", record.index)
        else:
            self.hedge.update(self._r_hat)
            record.updated = True
        self.j += 1
        if self.j < self.N:
            self._start_block(rng)
