from fastapi import APIRouter
from app.api.v1 import adversaries, benchmarks, grids, simulations, verification

api_router = APIRouter()

api_router.include_router(grids.router)
api_router.include_router(benchmarks.router)
api_router.include_router(adversaries.router)
api_router.include_router(simulations.router)
api_router.include_router(verification.router)
