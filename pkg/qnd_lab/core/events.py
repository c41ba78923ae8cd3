from loguru import logger
from typing import Optional
import sys


def setup_logging(level: str = "INFO", log_file: Optional[str] = None):
    """Configure logging"""
    logger.remove()
    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>",
        level=level
    )
    if log_file:
        logger.add(
            log_file,
            rotation="100 MB",
            retention="10 days",
            level="DEBUG"
        )
    logger.debug(f"Logging configured at level {level}")
