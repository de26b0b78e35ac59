"""
Logging configuration for the command-line front end.
"""

import logging
import sys
from typing import Optional

from kdet.config import get_settings


def configure_logging(level: Optional[str] = None) -> None:
    """Attach a stderr handler to the ``kdet`` logger; stdout stays reserved for reports."""
    logger = logging.getLogger("kdet")
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        logger.addHandler(handler)
    logger.setLevel((level or get_settings().log_level).upper())
