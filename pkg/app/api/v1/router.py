from fastapi import APIRouter

from app.api.v1.duality.router import router as duality_router
from app.api.v1.health.router import router as health_router

api_router = APIRouter()

api_router.include_router(health_router)
api_router.include_router(duality_router)
