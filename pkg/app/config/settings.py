from pydantic_settings import BaseSettings
from pydantic import Field, field_validator
from typing import Any, List, Optional
from functools import lru_cache
import logging


class Settings(BaseSettings):
    """Service settings with environment variable support"""

    # Environment
    ENVIRONMENT: str = Field(default="development")
    DEBUG: bool = Field(default=False)

    # API Settings
    API_V1_STR: str = "/api/v1"
    PROJECT_NAME: str = "Aubert Dual Service"

    # Calculus
    DEFAULT_GROUP: str = Field(default="Sp")
    DEFAULT_RHO: str = Field(default="1")
    STRICT_CHECKS: bool = Field(default=False)

    # Verification harness
    MAX_ENUMERATION_RANK: int = Field(default=8, ge=0)
    VERIFY_WORKERS: int = Field(default=1, ge=1)

    # Logging
    LOG_LEVEL: str = Field(default="WARNING")
    LOG_FILE: Optional[str] = Field(default=None)
    LOG_JSON: bool = Field(default=True)

    # Security
    CORS_ORIGINS: List[str] = Field(default=["*"])

    @field_validator("CORS_ORIGINS", mode="before")
    @classmethod
    def assemble_cors_origins(cls, v: Any) -> Any:
        if isinstance(v, str) and not v.startswith("["):
            return [i.strip() for i in v.split(",")]
        elif isinstance(v, (list, str)):
            return v
        raise ValueError(v)

    @field_validator("LOG_LEVEL")
    @classmethod
    def check_log_level(cls, v: str) -> str:
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level {v!r}")
        return level

    @field_validator("DEFAULT_GROUP")
    @classmethod
    def check_group(cls, v: str) -> str:
        if v not in ("Sp", "SO"):
            raise ValueError("DEFAULT_GROUP must be 'Sp' or 'SO'")
        return v

    model_config = {"env_file": ".env", "case_sensitive": True, "extra": "ignore"}


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()
