from app.services.learners.hedge import ActionDistribution, Hedge
from app.services.learners.exp3p import Exp3P
from app.services.learners.gft_estimator import EstimatorVariant, GftEstimate, GftEstimator
from app.services.learners.block import BlockDecomposition, BlockStep

__all__ = [
    "ActionDistribution",
    "Hedge",
    "Exp3P",
    "EstimatorVariant",
    "GftEstimate",
    "GftEstimator",
    "BlockDecomposition",
    "BlockStep",
]
