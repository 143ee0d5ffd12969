from fastapi import APIRouter, Depends, HTTPException, status

from app.api.deps import verify_api_key
from app.config import settings
from app.schemas.experiment import AggregateResult, ExperimentConfig, SimulationRequest, SimulationResponse
from app.services.experiment_service import ExperimentService

router = APIRouter(prefix="/simulations", tags=["simulations"])


def _check_size(rounds: int) -> None:
    if rounds > settings.MAX_SEQUENCE_ROWS:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"Too many rounds. Max: {settings.MAX_SEQUENCE_ROWS}"
        )


@router.post("/run", response_model=SimulationResponse)
def run_simulation(
    request: SimulationRequest,
    authorized: bool = Depends(verify_api_key)
):
    """
    Run GFT-Max once with the preset for `algo`

    Either `sequence` (inline s, b columns) or `adversary` plus `T` must be given.
    Invalid parameters answer 400; an infeasible post answers 500.
    """
    _check_size(len(request.sequence.s) if request.sequence else request.T)
    _, response = ExperimentService.simulate_once(request)
    return response


@router.post("/curve", response_model=AggregateResult)
def regret_curve(
    config: ExperimentConfig,
    authorized: bool = Depends(verify_api_key)
):
    """Seeded replications over several horizons; artifacts land under STORAGE_PATH"""
    _check_size(config.horizons[-1] * config.replications)
    return ExperimentService.run(config.model_copy(update={"out_dir": None}))
