"""
Logging module for kmsdyn.
Console output plus a rotating log file per logger under ~/.kmsdyn/logs.
"""

import datetime
import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

# Dictionary to store loggers so we don't create duplicates
_loggers = {}


def get_logs_directory():
    """Get or create the logs directory.

    The base directory is ``$KMSDYN_HOME`` when set, otherwise ``~/.kmsdyn``.
    """
    base = os.getenv("KMSDYN_HOME") or os.path.join(str(Path.home()), ".kmsdyn")
    logs_dir = os.path.join(base, "logs")
    os.makedirs(logs_dir, exist_ok=True)
    return logs_dir


def setup_logger(name, level=None, max_size=10485760, backup_count=5):
    """
    Set up and configure a logger.

    Args:
        name: Name of the logger
        level: Logging level (default: Read from LOG_LEVEL env var, or WARNING)
               Supported values: DEBUG, INFO, WARNING, ERROR, CRITICAL
        max_size: Maximum size of log file before rotation in bytes (default: 10MB)
        backup_count: Number of backup files to keep (default: 5)

    Returns:
        Logger: Configured logger
    """
    if name in _loggers:
        return _loggers[name]

    if level is None:
        level_name = os.getenv("LOG_LEVEL", "WARNING").upper()
        level = getattr(logging, level_name, logging.WARNING)
        if not isinstance(level, int):
            level = logging.WARNING

    logger = logging.getLogger(name)
    logger.setLevel(level)

    if logger.handlers:
        _loggers[name] = logger
        return logger

    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # A read-only home must not stop the computation; fall back to console only
    try:
        today = datetime.datetime.now().strftime("%Y-%m-%d")
        log_file = os.path.join(get_logs_directory(), f"{name}_{today}.log")
        file_handler = RotatingFileHandler(
            log_file, maxBytes=max_size, backupCount=backup_count
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    except OSError as e:
        logger.warning(f"File logging disabled: {e}")

    _loggers[name] = logger
    return logger


def get_logger(name):
    """
    Get an existing logger or create a new one.

    Args:
        name: Name of the logger

    Returns:
        Logger: The requested logger
    """
    if name in _loggers:
        return _loggers[name]
    return setup_logger(name)
