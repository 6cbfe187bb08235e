import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

from app.settings import get_settings

_configured = False


class ConsoleHandler(logging.StreamHandler):
    """StreamHandler bound to whatever sys.stderr is at emit time."""

    @property
    def stream(self):
        return sys.stderr

    @stream.setter
    def stream(self, value):
        pass


def setup_logging(level: Optional[str] = None, log_dir: Optional[str] = None):
    global _configured
    settings = get_settings()
    log_dir = log_dir or settings.log_dir
    level = getattr(logging, (level or settings.log_level).upper(), logging.INFO)

    logger = logging.getLogger()
    logger.setLevel(level)
    if _configured:
        for handler in logger.handlers:
            handler.setLevel(level)
        return

    # Create logs directory if it doesn't exist
    if not os.path.exists(log_dir):
        os.makedirs(log_dir)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    # File handler with rotation
    main_log = os.path.join(log_dir, "scheduler.log")
    file_handler = RotatingFileHandler(
        main_log,
        maxBytes=10*1024*1024,  # 10MB
        backupCount=5
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(formatter)

    console_handler = ConsoleHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)
    _configured = True

def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for a specific module"""
    return logging.getLogger(name)
