import time
from typing import Any

from fastapi import APIRouter, HTTPException

from app import __version__
from app.config.settings import get_settings
from app.core.utils import get_logger
from app.services.golden import GOLDEN_CASES, run_golden

router = APIRouter(prefix="/health", tags=["Health Check"])
logger = get_logger(__name__)


@router.get("/")
async def basic_health_check() -> dict[str, Any]:
    """Basic health check endpoint"""
    return {
        "status": "healthy",
        "service": "aubert-dual",
        "version": __version__,
        "timestamp": time.time(),
        "environment": get_settings().ENVIRONMENT,
    }


@router.get("/detailed")
async def detailed_health_check() -> dict[str, Any]:
    """Runs the first worked example through the full dual as a smoke test"""
    start_time = time.time()
    health_status: dict[str, Any] = {
        "status": "healthy",
        "service": "aubert-dual",
        "version": __version__,
        "timestamp": start_time,
        "environment": get_settings().ENVIRONMENT,
        "checks": {},
    }

    case = GOLDEN_CASES[0]
    try:
        outcome = run_golden(case)
        health_status["checks"]["dual"] = {
            "status": "healthy" if outcome.ok else "unhealthy",
            "example": case.name,
        }
        if not outcome.ok:
            health_status["status"] = "unhealthy"
    except Exception as e:
        health_status["status"] = "unhealthy"
        health_status["checks"]["dual"] = {"status": "unhealthy", "message": str(e)}
        logger.error("health.dual_failed", error=str(e))

    health_status["response_time_ms"] = round((time.time() - start_time) * 1000, 2)
    if health_status["status"] == "unhealthy":
        raise HTTPException(status_code=503, detail=health_status)
    return health_status


@router.get("/liveness")
async def liveness_check() -> dict[str, Any]:
    """Kubernetes liveness probe endpoint"""
    return {"status": "alive", "timestamp": time.time()}
