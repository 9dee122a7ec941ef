from typing import Any, Dict, Optional, Sequence

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from app.core.utils import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INTERNAL = 3


class DualityServiceError(Exception):
    """Base exception for the duality services"""

    exit_code: int = EXIT_INTERNAL

    def __init__(
        self,
        message: str,
        status_code: int = 500,
        details: Optional[Dict[str, Any]] = None,
        exit_code: Optional[int] = None,
    ):
        self.message = message
        self.status_code = status_code
        self.details = details or {}
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(self.message)


class RepresentationSyntaxError(DualityServiceError):
    """Raised when an expression or header does not follow the grammar"""

    exit_code = EXIT_VALIDATION

    def __init__(self, reason: str, text: str, position: int):
        self.position = position
        super().__init__(
            message=f"syntax error at position {position}: {reason}",
            status_code=422,
            details={"reason": reason, "position": position, "text": text},
        )


class UndeclaredSymbolError(DualityServiceError):
    """Raised when an expression names a rho or sigma missing from the header"""

    exit_code = EXIT_VALIDATION

    def __init__(self, kind: str, symbol: str):
        super().__init__(
            message=f"undeclared {kind} '{symbol}'",
            status_code=422,
            details={"kind": kind, "symbol": symbol},
        )


class DatumValidationError(DualityServiceError):
    """Raised when a datum breaks one of the model invariants"""

    exit_code = EXIT_VALIDATION

    def __init__(self, diagnostics: Sequence[str]):
        self.diagnostics = list(diagnostics)
        super().__init__(
            message="invalid datum: " + "; ".join(self.diagnostics),
            status_code=422,
            details={"diagnostics": self.diagnostics},
        )


class UnsupportedPointError(DualityServiceError):
    """Raised for a derivative point the calculus does not cover"""

    exit_code = EXIT_VALIDATION

    def __init__(self, point: str, reason: str):
        super().__init__(
            message=f"unsupported point {point}: {reason}",
            status_code=422,
            details={"point": point, "reason": reason},
        )


class PreconditionError(DualityServiceError):
    """Raised when an operation is called outside its domain"""

    exit_code = EXIT_VALIDATION

    def __init__(self, operation: str, reason: str):
        super().__init__(
            message=f"{operation}: {reason}",
            status_code=422,
            details={"operation": operation, "reason": reason},
        )


class UnsupportedSocleError(DualityServiceError):
    """Raised for an in-domain socle that no implemented construction reaches"""

    exit_code = EXIT_VALIDATION

    def __init__(self, operation: str, reason: str):
        super().__init__(
            message=f"{operation} unsupported: {reason}",
            status_code=422,
            details={"operation": operation, "reason": reason},
        )


class EnumerationBudgetError(DualityServiceError):
    """Raised when enumeration parameters exceed the configured budget"""

    exit_code = EXIT_VALIDATION

    def __init__(self, requested: int, allowed: int):
        super().__init__(
            message=f"max_rank {requested} exceeds the budget of {allowed}",
            status_code=422,
            details={"requested": requested, "allowed": allowed},
        )


class InternalConsistencyError(DualityServiceError):
    """Raised when an internal invariant or postcondition fails"""

    exit_code = EXIT_INTERNAL

    def __init__(self, message: str, datum: Optional[str] = None):
        super().__init__(
            message=message,
            status_code=500,
            details={"datum": datum} if datum else {},
        )


def _error_body(request: Request, message: str, kind: str, details: Any = None) -> Dict[str, Any]:
    error: Dict[str, Any] = {"message": message, "type": kind}
    if details is not None:
        error["details"] = details
    return {"error": error, "request_id": getattr(request.state, "request_id", None)}


def setup_exception_handlers(app: FastAPI) -> None:
    """Map the exception hierarchy onto JSON error bodies"""

    @app.exception_handler(DualityServiceError)
    async def duality_exception_handler(request: Request, exc: DualityServiceError) -> JSONResponse:
        log = logger.error if exc.exit_code == EXIT_INTERNAL else logger.warning
        log(
            "api.duality_error",
            error=exc.message,
            status_code=exc.status_code,
            path=request.url.path,
        )
        return JSONResponse(
            status_code=exc.status_code,
            content=_error_body(request, exc.message, exc.__class__.__name__, exc.details),
        )

    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        logger.warning("api.request_invalid", path=request.url.path, errors=len(exc.errors()))
        details = jsonable_encoder(exc.errors())
        return JSONResponse(
            status_code=422,
            content=_error_body(request, "Request validation failed", "ValidationError", details),
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(request: Request, exc: StarletteHTTPException) -> JSONResponse:
        logger.warning("api.http_error", status_code=exc.status_code, path=request.url.path)
        return JSONResponse(
            status_code=exc.status_code,
            content=_error_body(request, exc.detail, "HTTPException"),
        )

    @app.exception_handler(Exception)
    async def general_exception_handler(request: Request, exc: Exception) -> JSONResponse:
        logger.error(
            "api.unexpected_error",
            path=request.url.path,
            exception_type=exc.__class__.__name__,
            error=str(exc),
        )
        return JSONResponse(
            status_code=500,
            content=_error_body(request, "Internal server error", "InternalServerError"),
        )
