import logging
import sys
from typing import Optional

import structlog

from app.config.settings import get_settings

_configured = False


def setup_logging(level: Optional[str] = None, force: bool = False) -> None:
    """Configure structured logging on stderr; stdout carries query results only."""
    global _configured
    if _configured and not force:
        return

    settings = get_settings()
    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if settings.LOG_JSON
        else structlog.dev.ConsoleRenderer(colors=False)
    )

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.LOG_FILE:
        handlers.append(logging.FileHandler(settings.LOG_FILE, mode="a", encoding="utf-8"))

    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper()),
        format="%(message)s",
        handlers=handlers,
        force=force,
    )

    logging.getLogger("uvicorn").setLevel(logging.INFO)
    logging.getLogger("httpx").setLevel(logging.WARNING)
    _configured = True


class LoggerMixin:
    """Mixin to add structured logging to classes"""

    @property
    def logger(self) -> structlog.BoundLogger:
        """Get structured logger for the class"""
        return structlog.get_logger(self.__class__.__name__)


def get_logger(name: str) -> structlog.BoundLogger:
    """Get a structured logger instance"""
    return structlog.get_logger(name)
