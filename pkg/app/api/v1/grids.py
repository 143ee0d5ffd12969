from fastapi import APIRouter, Depends, HTTPException, Query, status
from typing import Optional

from app.api.deps import bad_request, verify_api_key
from app.exceptions import ConfigurationError
from app.models import GridKind
from app.schemas.grid import GridOut
from app.services.grid_service import GridService

router = APIRouter(prefix="/grids", tags=["grids"])

MAX_GRID_K = 4096


@router.get("/{kind}", response_model=GridOut)
def get_grid(
    kind: GridKind,
    K: int = Query(..., ge=1),
    T: Optional[int] = Query(None, ge=1),
    authorized: bool = Depends(verify_api_key)
):
    """
    List the pairs of G_K (uniform), H_K (pairs) or F_K (revenue)

    The revenue grid needs the horizon T
    """
    if K > MAX_GRID_K:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"K too large. Max: {MAX_GRID_K}"
        )
    try:
        grid = GridService.build(kind, K, T)
    except ConfigurationError as e:
        raise bad_request(e)
    return GridOut(kind=grid.kind.value, K=grid.K, T=grid.T, size=len(grid),
                   p=grid.p.tolist(), q=grid.q.tolist())
