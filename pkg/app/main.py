import time
from contextlib import asynccontextmanager
from typing import Any, AsyncIterator

from fastapi import FastAPI

from app import __version__
from app.api.v1.router import api_router
from app.config.settings import get_settings
from app.core.exceptions import setup_exception_handlers
from app.core.middleware import setup_middleware
from app.core.utils import get_logger, setup_logging

settings = get_settings()
logger = get_logger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncIterator[None]:
    """Application lifespan management"""
    logger.info("service.starting", group=settings.DEFAULT_GROUP, strict=settings.STRICT_CHECKS)
    yield
    logger.info("service.stopped")


app = FastAPI(
    title=settings.PROJECT_NAME,
    description="Zelevinsky-Aubert duals, derivatives and socles for p-adic Sp(2n) and SO(2n+1)",
    version=__version__,
    docs_url="/docs" if settings.ENVIRONMENT == "development" else None,
    redoc_url="/redoc" if settings.ENVIRONMENT == "development" else None,
    lifespan=lifespan,
)

setup_logging()
setup_middleware(app)
setup_exception_handlers(app)
app.include_router(api_router, prefix=settings.API_V1_STR)


@app.get("/health")
async def health_check() -> dict[str, Any]:
    """Health check endpoint"""
    return {
        "status": "healthy",
        "service": "aubert-dual",
        "version": __version__,
        "timestamp": time.time(),
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(
        "app.main:app",
        host="0.0.0.0",
        port=8001,
        reload=settings.ENVIRONMENT == "development",
        log_level="info",
    )
