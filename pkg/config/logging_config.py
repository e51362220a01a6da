"""
Logger Configuration
"""
import logging
import sys
from pathlib import Path
from typing import Optional

from .settings import settings


def setup_logger(name: str = "memsgd", log_level: Optional[str] = None) -> logging.Logger:
    """
    Set up and configure application logger.

    Args:
        name: Logger name (default: "memsgd")
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
                   If None, uses DEBUG if settings.DEBUG is True, else settings.LOG_LEVEL

    Returns:
        Configured logger instance
    """
    # Determine log level
    if log_level is None:
        log_level = "DEBUG" if settings.DEBUG else settings.LOG_LEVEL
    level = getattr(logging, log_level.upper(), logging.INFO)

    # Create logger
    logger = logging.getLogger(name)
    logger.setLevel(level)

    # Avoid adding handlers multiple times
    if logger.handlers:
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
                handler.setLevel(level)
        return logger

    # Create formatter
    formatter = logging.Formatter(
        fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S"
    )

    # Console handler; stdout is left to command output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # File handler, only when MEMSGD_LOG_FILE is set
    if settings.LOG_FILE:
        try:
            log_file = Path(settings.LOG_FILE)
            log_file.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file)
            file_handler.setLevel(logging.DEBUG)  # Always log DEBUG to file
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)
        except OSError:
            # If file logging fails, continue without it
            pass

    return logger


# Create default logger instance
logger = setup_logger()
