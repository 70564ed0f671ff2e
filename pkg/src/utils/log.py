"""Loguru sink setup shared by the CLI and tests."""

import sys

from loguru import logger

from ..config.settings import settings

_FORMAT = "<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | {name}:{line} - {message}"


def configure_logging(level: str | None = None) -> None:
    """Replace loguru's default handler with a single stderr sink."""
    logger.remove()
    logger.add(sys.stderr, level=(level or settings.log_level).upper(), format=_FORMAT)
