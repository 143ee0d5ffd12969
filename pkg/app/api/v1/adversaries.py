from fastapi import APIRouter, Depends, HTTPException, status
import numpy as np

from app.api.deps import bad_request, verify_api_key
from app.config import settings
from app.exceptions import BilateralTradeError
from app.schemas.adversary import EmitRequest, EmitResponse, GapMixtureReport
from app.schemas.report import TwoBitStructureReport
from app.models.lower_bound import TwoBitLBParams
from app.services.adversary_service import AdversaryService
from app.services.experiment_service import ExperimentService
from app.services.lower_bound_service import LowerBoundService

router = APIRouter(prefix="/adversaries", tags=["adversaries"])


@router.post("/emit", response_model=EmitResponse)
def emit_sequence(
    request: EmitRequest,
    authorized: bool = Depends(verify_api_key)
):
    """Generate a valuation sequence from one of the adversary families"""
    if request.T > settings.MAX_SEQUENCE_ROWS:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"T too large. Max: {settings.MAX_SEQUENCE_ROWS}"
        )
    seed = settings.DEFAULT_MASTER_SEED if request.seed is None else request.seed
    try:
        seq = ExperimentService.make_sequence(request.adversary, request.T, np.random.default_rng(seed))
    except BilateralTradeError as e:
        raise bad_request(e)
    return EmitResponse(family=request.adversary.family, T=len(seq), seed=seed,
                        s=seq.s.tolist(), b=seq.b.tolist())


@router.get("/twobit-lb/structure", response_model=TwoBitStructureReport)
def twobit_structure(
    N: int = 64,
    k: int = 0,
    w5_upper: bool = True,
    authorized: bool = Depends(verify_api_key)
):
    """Exact structural checks of one two-bit lower-bound instance"""
    try:
        params = TwoBitLBParams.build(N, k, w5_upper=w5_upper)
    except BilateralTradeError as e:
        raise bad_request(e)
    return LowerBoundService.twobit_lb_structure_report(params)


@router.get("/gap/mixture", response_model=GapMixtureReport)
def gap_mixture(
    eps: float = 0.05,
    T: int = 200,
    authorized: bool = Depends(verify_api_key)
):
    try:
        return AdversaryService.gap_mixture(eps, T)
    except BilateralTradeError as e:
        raise bad_request(e)
