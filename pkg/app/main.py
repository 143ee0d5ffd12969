from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from contextlib import asynccontextmanager
import logging
import time

from app.config import configure_logging, settings
from app.api.v1 import api_router
from app.exceptions import BilateralTradeError, InfeasiblePostError
from app.services.storage_service import StorageService
from app.services.verification_service import SUITES

logger = logging.getLogger("app")


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Prepare the artifact directories and logging"""
    configure_logging()
    for path in (settings.STORAGE_PATH, settings.curves_dir, settings.summaries_dir, settings.traces_dir):
        StorageService.ensure_dir(path)
    logger.info("Starting %s v%s (storage %s, auth %s, master seed %d)",
                settings.APP_NAME, settings.APP_VERSION, settings.STORAGE_PATH,
                "on" if settings.API_SECRET_KEY else "off", settings.DEFAULT_MASTER_SEED)
    yield
    logger.info("Shutting down %s", settings.APP_NAME)


app = FastAPI(
    title=settings.APP_NAME,
    version=settings.APP_VERSION,
    description="Repeated bilateral trade under global budget balance: simulations, benchmarks and checks",
    lifespan=lifespan
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


# Simulations can run for seconds; report wall time per request
@app.middleware("http")
async def add_process_time_header(request: Request, call_next):
    start = time.perf_counter()
    response = await call_next(request)
    elapsed = time.perf_counter() - start
    response.headers["X-Process-Time"] = f"{elapsed:.6f}"
    if elapsed > 5.0:
        logger.info("%s %s took %.1fs", request.method, request.url.path, elapsed)
    return response


@app.exception_handler(InfeasiblePostError)
async def infeasible_post_handler(request: Request, exc: InfeasiblePostError):
    logger.error("Budget invariant broken on %s: %s", request.url.path, exc)
    return JSONResponse(
        status_code=500,
        content={
            "detail": str(exc),
            "round": exc.round_index,
            "phase": exc.phase,
            "p": exc.p,
            "q": exc.q,
            "budget": exc.budget,
        },
    )


@app.exception_handler(BilateralTradeError)
async def bilateral_trade_exception_handler(request: Request, exc: BilateralTradeError):
    status_code = 400 if isinstance(exc, ValueError) else 500
    if status_code == 500:
        logger.error("Unhandled simulation error on %s: %s", request.url.path, exc)
    return JSONResponse(status_code=status_code, content={"detail": str(exc)})


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    logger.exception("Unhandled error on %s", request.url.path)
    return JSONResponse(
        status_code=500,
        content={
            "detail": "Internal server error",
            "message": str(exc) if settings.DEBUG else "An error occurred"
        }
    )


@app.get("/health")
async def health_check():
    return {
        "status": "healthy",
        "app": settings.APP_NAME,
        "version": settings.APP_VERSION
    }


@app.get("/")
async def root():
    return {
        "app": settings.APP_NAME,
        "version": settings.APP_VERSION,
        "docs": "/docs",
        "health": "/health",
        "log_base": settings.LOG_BASE,
        "default_seed": settings.DEFAULT_MASTER_SEED,
        "verify_suites": list(SUITES),
    }

app.include_router(api_router, prefix="/api/v1")

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "app.main:app",
        host=settings.HOST,
        port=settings.PORT,
        reload=settings.DEBUG
    )
