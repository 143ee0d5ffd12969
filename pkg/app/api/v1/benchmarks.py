from fastapi import APIRouter, Depends, File, HTTPException, Query, UploadFile, status
from typing import Literal
import logging

from app.api.deps import bad_request, verify_api_key
from app.config import settings
from app.exceptions import SequenceFormatError
from app.schemas.benchmark import HindsightReport, SequenceIn
from app.services.benchmark_service import BenchmarkService
from app.services.storage_service import StorageService

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/benchmarks", tags=["benchmarks"])

Which = Literal["fixed", "distribution", "both"]


@router.post("", response_model=HindsightReport)
def benchmark_sequence(
    payload: SequenceIn,
    which: Which = Query("both"),
    authorized: bool = Depends(verify_api_key)
):
    """Hindsight benchmarks of an inline valuation sequence"""
    if len(payload.s) > settings.MAX_SEQUENCE_ROWS:
        raise HTTPException(
            status_code=status.HTTP_413_REQUEST_ENTITY_TOO_LARGE,
            detail=f"Sequence too long. Max rows: {settings.MAX_SEQUENCE_ROWS}"
        )
    return BenchmarkService.hindsight_report(payload.to_sequence(), which)


@router.post("/upload", response_model=HindsightReport)
async def benchmark_upload(
    file: UploadFile = File(...),
    which: Which = Query("both"),
    authorized: bool = Depends(verify_api_key)
):
    """
    Hindsight benchmarks of an uploaded `s,b` CSV

    The upload is stored under STORAGE_PATH/sequences while it is parsed
    """
    content = await file.read()
    file_path = StorageService.upload_path(file.filename)
    await StorageService.save_upload_file(content, file_path)
    try:
        text = (await StorageService.read_file(file_path)).decode("utf-8")
        seq = StorageService.parse_sequence_csv(text, max_rows=settings.MAX_SEQUENCE_ROWS)
    except (SequenceFormatError, UnicodeDecodeError) as e:
        logger.warning("Rejected sequence upload %s: %s", file.filename, e)
        raise bad_request(e)
    finally:
        StorageService.delete_file(file_path)
    return BenchmarkService.hindsight_report(seq, which)
