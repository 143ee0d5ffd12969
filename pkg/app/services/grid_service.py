import logging
from fractions import Fraction
from typing import Set, Tuple

import numpy as np

from app.exceptions import ConfigurationError
from app.models import GridKind, PriceGrid

logger = logging.getLogger(__name__)


class GridService:
    """Price discretizations: uniform grid G_K, adjacent pairs H_K, revenue grid F_K"""

    @staticmethod
    def _check_resolution(K: int) -> None:
        if not isinstance(K, (int, np.integer)) or K < 1:
            raise ConfigurationError(f"Grid resolution K must be a positive integer, got {K!r}")

    @staticmethod
    def uniform_grid(K: int) -> PriceGrid:
        """{0, 1/K, ..., 1} stored as diagonal pairs"""
        GridService._check_resolution(K)
        x = np.arange(K + 1, dtype=np.float64) / K
        return PriceGrid(GridKind.UNIFORM, int(K), x, x.copy())

    @staticmethod
    def adjacent_pairs(K: int) -> PriceGrid:
        """((i+1)/K, i/K) for i = 0..K-1; each trade costs exactly 1/K"""
        GridService._check_resolution(K)
        i = np.arange(K, dtype=np.float64)
        return PriceGrid(GridKind.ADJACENT_PAIRS, int(K), (i + 1) / K, i / K)

    @staticmethod
    def log2_floor(T: int) -> int:
        return int(T).bit_length() - 1

    @staticmethod
    def revenue_grid(K: int, T: int) -> PriceGrid:
        """
        Union of (x - 2^-i, x) and (x, x + 2^-i) over x in G_K and
        i in {0..floor(log2 T)}, restricted to [0,1]^2.

        Candidates outside the square are dropped, and duplicates are removed
        on exact rationals before rendering to float.
        """
        GridService._check_resolution(K)
        if not isinstance(T, (int, np.integer)) or T < 2:
            raise ConfigurationError(f"Revenue grid horizon T must be an integer >= 2, got {T!r}")

        points: Set[Tuple[Fraction, Fraction]] = set()
        for i in range(GridService.log2_floor(T) + 1):
            d = Fraction(1, 2 ** i)
            for j in range(K + 1):
                x = Fraction(j, K)
                if x - d >= 0:
                    points.add((x - d, x))
                if x + d <= 1:
                    points.add((x, x + d))

        ordered = sorted(points)
        p = np.array([float(a) for a, _ in ordered], dtype=np.float64)
        q = np.array([float(c) for _, c in ordered], dtype=np.float64)
        logger.debug("Revenue grid K=%d T=%d has %d pairs", K, T, len(ordered))
        return PriceGrid(GridKind.REVENUE, int(K), p, q, T=int(T))

    @staticmethod
    def revenue_grid_bound(K: int, T: int) -> int:
        """Cardinality ceiling 2(K+1)(floor(log2 T)+1)"""
        return 2 * (K + 1) * (GridService.log2_floor(T) + 1)

    @staticmethod
    def build(kind: GridKind, K: int, T: int = None) -> PriceGrid:
        kind = GridKind(kind)
        if kind is GridKind.UNIFORM:
            return GridService.uniform_grid(K)
        if kind is GridKind.ADJACENT_PAIRS:
            return GridService.adjacent_pairs(K)
        if T is None:
            raise ConfigurationError("The revenue grid needs a horizon T")
        return GridService.revenue_grid(K, T)
