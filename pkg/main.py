"""
Semantic matchmaker entry point
"""

import logging
import sys

import config
from cli.commands import cli_main


# Logging
def setup_logging():
    """Configure root logging: stderr always, plus a file when MATCHMAKER_LOG_FILE is set"""
    log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        handlers.append(logging.FileHandler(config.LOG_FILE, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL, logging.WARNING),
        format=log_format,
        handlers=handlers,
    )
    return logging.getLogger(__name__)


logger = setup_logging()


if __name__ == "__main__":
    sys.exit(cli_main())
