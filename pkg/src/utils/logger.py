"""
Logging for the MNPCA package: one file log plus a console copy on stderr.
"""

import logging
import sys
from typing import Optional

from src.utils.config import LOG_FILE, LOG_LEVEL


def setup_logger(name: Optional[str] = None) -> logging.Logger:
    """Module logger writing to logs/mnpca.log and to stderr.

    The level comes from MNPCA_LOG_LEVEL (INFO when unset or unknown). Handlers
    are attached once per name, and records do not propagate to the root logger,
    so repeated calls from the same module never duplicate output.

    Args:
        name: Logger name, usually the calling module's __name__

    Returns:
        The configured logger
    """
    LOG_FILE.parent.mkdir(parents=True, exist_ok=True)

    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    level = logging.getLevelName(LOG_LEVEL)
    if not isinstance(level, int):
        level = logging.INFO
    logger.setLevel(level)

    file_handler = logging.FileHandler(LOG_FILE)
    file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
    file_handler.setLevel(level)

    # stdout is reserved for CLI tables
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
    console_handler.setLevel(level)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)
    logger.propagate = False
    return logger
