from fastapi import Header, HTTPException, status
from typing import Optional

from app.config import settings


# Dependency for API key authentication (service-to-service)
async def verify_api_key(x_api_key: Optional[str] = Header(None)) -> bool:
    """Verify the X-API-Key header; the API is open when API_SECRET_KEY is unset"""
    if not settings.API_SECRET_KEY:
        return True

    if not x_api_key:
        raise HTTPException(
            status_code=status.HTTP_401_UNAUTHORIZED,
            detail="API key is required",
            headers={"WWW-Authenticate": "ApiKey"},
        )

    if x_api_key != settings.API_SECRET_KEY:
        raise HTTPException(
            status_code=status.HTTP_403_FORBIDDEN,
            detail="Invalid API key"
        )

    return True


def bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(exc))
