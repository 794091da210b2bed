"""
Configuration for development, testing and production runs.

Every key has a default; no environment variable is required.
"""

import os
from enum import Enum

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

__version__ = "0.1.0"


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == "true"


class Environment(str, Enum):
    """Environment modes."""
    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


class Config:
    """Base configuration."""

    ENV = os.getenv("ENVIRONMENT", Environment.DEVELOPMENT.value)

    # Logging Config
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_DIR = os.getenv("LOG_DIR", "./logs")
    FLOW_LOGGING_ENABLED = _env_bool("FLOW_LOGGING_ENABLED", "true")
    FLOW_LOG_INPUTS = True

    # Solver defaults (CLI flags override)
    MAX_ITERS = int(os.getenv("YAMABE_MAX_ITERS", "100000"))
    GRAD_TOL = float(os.getenv("YAMABE_GRAD_TOL", "1e-9"))
    RESTARTS = int(os.getenv("YAMABE_RESTARTS", "3"))
    FLOOR_EPS = float(os.getenv("YAMABE_FLOOR_EPS", "1e-14"))

    # Sweep Config
    SWEEP_WORKERS = int(os.getenv("SWEEP_WORKERS", "1"))

    ARTIFACT_VERSION = os.getenv("ARTIFACT_VERSION", __version__)


class DevelopmentConfig(Config):
    """Development-specific config (base defaults)."""


class TestingConfig(Config):
    """Testing-specific config."""

    FLOW_LOGGING_ENABLED = _env_bool("FLOW_LOGGING_ENABLED", "false")


class ProductionConfig(Config):
    """Production-specific config."""

    FLOW_LOG_INPUTS = False  # Summaries only, no argument dumps


def get_config() -> Config:
    """Get config based on ENVIRONMENT variable."""
    env = os.getenv("ENVIRONMENT", Environment.DEVELOPMENT.value).lower()

    if env == Environment.PRODUCTION.value:
        return ProductionConfig()
    elif env == Environment.TESTING.value:
        return TestingConfig()
    else:
        return DevelopmentConfig()


config = get_config()
