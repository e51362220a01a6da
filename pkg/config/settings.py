"""
Application Configuration

Loads environment variables from a ``.env`` file in the current working
directory (where the simulator runs), then exposes them through a singleton
``settings`` object. Experiment parameters live in config files parsed by the
CLI; this module only holds process-wide knobs.
"""
import os
from pathlib import Path
from typing import Optional

# Load environment variables from .env file in the current working directory
from dotenv import load_dotenv

env_path = Path.cwd() / ".env"
if env_path.exists():
    load_dotenv(dotenv_path=env_path)


class Settings:
    """Application settings loaded from environment variables"""

    DEBUG: bool = os.getenv("MEMSGD_DEBUG", "False").lower() == "true"

    # Logging Configuration
    LOG_LEVEL: str = os.getenv("MEMSGD_LOG_LEVEL", "INFO")
    LOG_FILE: Optional[str] = os.getenv("MEMSGD_LOG_FILE") or None

    # Worker pool size used when a run config does not set one.
    # Results never depend on it.
    THREADS: int = int(os.getenv("MEMSGD_THREADS", "1"))

    OUTPUT_DIR: str = os.getenv("MEMSGD_OUTPUT_DIR", "results")

    # Diagnostic tolerances (scale-relative)
    RESIDUAL_TOL: float = float(os.getenv("MEMSGD_RESIDUAL_TOL", "1e-10"))
    IDENTITY_TOL: float = float(os.getenv("MEMSGD_IDENTITY_TOL", "1e-12"))

    # Inner proximal solver used for Moreau-envelope gradients
    PROX_TOL: float = float(os.getenv("MEMSGD_PROX_TOL", "1e-8"))
    PROX_MAX_ITER: int = int(os.getenv("MEMSGD_PROX_MAX_ITER", "100000"))


# Create singleton settings instance
settings = Settings()
