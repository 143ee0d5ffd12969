from fastapi import APIRouter, Depends, HTTPException, Query, status
from typing import Optional

from app.api.deps import verify_api_key
from app.config import settings
from app.schemas.verification import VerifyReport, VerifyScale
from app.services.verification_service import SUITES, VerificationService

router = APIRouter(prefix="/verify", tags=["verify"])


@router.post("/{suite}", response_model=VerifyReport)
def run_verification(
    suite: str,
    seed: Optional[int] = None,
    quick: bool = Query(True, description="Reduced workloads; full scale can take hours"),
    N: Optional[int] = Query(None, gt=32),
    authorized: bool = Depends(verify_api_key)
):
    if suite not in SUITES + ("all",):
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Unknown suite {suite}. Choose from {', '.join(SUITES)} or all"
        )
    seed = settings.DEFAULT_MASTER_SEED if seed is None else seed
    scale = VerifyScale.quick() if quick else VerifyScale()
    return VerificationService.verify(suite, seed, scale, N=N)
