"""Logging Configurations and Utilities."""

import logging
from rich.console import Console
from rich.logging import RichHandler
from Bebop.Utils.Config import settings

_FILE_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _level() -> int:
    level = logging.getLevelName(settings.log_level.upper())
    return level if isinstance(level, int) else logging.WARNING


def setup_logger(name: str = "bebop", level: int = None) -> logging.Logger:
    """Sets up a logger with a RichHandler and a file handler.

    - Creates a `bebop.log` file inside `settings.data_dir` when file logging is enabled.
    - Uses `RichHandler` for console formatting and a standard file handler for persisted logs.
    """
    level = _level() if level is None else level
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG if settings.log_to_file else level)

    # Remove existing handlers to avoid duplicate logs
    logger.handlers.clear()
    logger.propagate = False

    # stdout carries command output and plugin responses
    console_handler = RichHandler(
        console=Console(stderr=True), rich_tracebacks=True, markup=False, show_time=False, show_path=False
    )
    console_handler.setLevel(level)
    logger.addHandler(console_handler)

    if settings.log_to_file:
        try:
            file_handler = logging.FileHandler(settings.data_dir / "bebop.log")
        except OSError:
            return logger
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(_FILE_FORMAT))
        logger.addHandler(file_handler)
    return logger


def get_logger(name: str = "bebop") -> logging.Logger:
    """
    Get a logger instance with the given name.

    Args:
        name: Logger name (usually __name__)

    Returns:
        Configured logger instance
    """
    return setup_logger(name)


logger = setup_logger()
