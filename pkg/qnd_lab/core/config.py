from pydantic_settings import BaseSettings
from typing import Optional
import os

from .. import __version__


class Settings(BaseSettings):
    # App
    APP_NAME: str = "QND Lab"
    VERSION: str = __version__
    # forces DEBUG logging in the CLI regardless of LOG_LEVEL
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None

    # Parallelism (None -> os.cpu_count())
    QND_LAB_THREADS: Optional[int] = None

    # Quadrature
    QUAD_EPS_ABS: float = 1e-13
    QUAD_EPS_REL: float = 1e-10
    QUAD_LIMIT: int = 2000

    # Fock truncation
    FOCK_N_MAX_DEFAULT: int = 30
    COMPOSITE_DIM_CAP: int = 4096
    TAIL_MASS_TOL: float = 1e-12
    # largest trace or unitarity defect allowed for a truncated Fock-space mode
    TRUNCATION_TOL: float = 1e-6

    # Diagnostics
    HIGH_T_WARN_RATIO: float = 10.0

    # Output
    CSV_FLOAT_FORMAT: str = "%.17g"
    OUTPUT_DIR: str = "output"

    def worker_count(self) -> int:
        """Number of worker threads for parallel sweeps"""
        if self.QND_LAB_THREADS and self.QND_LAB_THREADS > 0:
            return self.QND_LAB_THREADS
        return os.cpu_count() or 1

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


settings = Settings()
