"""Shared extensions initialization."""
import logging
import sys

logger = logging.getLogger('previous_kit')


def init_logging(level='INFO', quiet=False):
    """Attach a single stderr handler to the package logger.

    Args:
        level: Logging level name
        quiet: Only report errors
    """
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    logger.addHandler(handler)
    logger.setLevel(logging.ERROR if quiet else getattr(logging, str(level).upper(), logging.INFO))
    logger.propagate = False
    return logger
