"""Logging utilities."""

import logging
import sys
from typing import TextIO

from setfalab.core.conf import load_user_config
from setfalab.utils.text import Color, color_parts, colored


class ColoredFormatter(logging.Formatter):
    """Defines a custom formatter for displaying logs."""

    COLORS: dict[str, Color] = {
        "WARNING": "yellow",
        "INFO": "cyan",
        "DEBUG": "grey",
        "CRITICAL": "yellow",
        "FATAL": "red",
        "ERROR": "red",
    }

    def __init__(self, *, prefix: str | None = None, use_color: bool = True) -> None:
        asc_start, asc_end = color_parts("grey")
        message = "{levelname:^19s} " + asc_start + "{asctime}" + asc_end + " [{name}] {message}"
        if prefix is not None:
            message = colored(prefix, "white") + " " + message
        super().__init__(message, style="{", datefmt="%Y-%m-%d %H:%M:%S")

        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        levelname = record.levelname
        if self.use_color and levelname in self.COLORS:
            record.levelname = colored(levelname, self.COLORS[levelname], bold=True)
        try:
            return logging.Formatter.format(self, record)
        finally:
            record.levelname = levelname


class _SetfaStreamHandler(logging.StreamHandler):
    pass


def configure_logging(stream: TextIO | None = None, *, level: str | None = None, use_color: bool | None = None) -> None:
    """Instantiates logging.

    Installs a single colored stream handler on the root logger. Calling this
    again replaces the previously installed handler.

    Args:
        stream: The stream to log to; defaults to stderr, so that stdout only
            carries command results.
        level: Overrides the log level from the user config.
        use_color: Overrides colour detection (colour is used on TTYs).
    """
    stream = sys.stderr if stream is None else stream
    root_logger = logging.getLogger()

    for handler in [h for h in root_logger.handlers if isinstance(h, _SetfaStreamHandler)]:
        root_logger.removeHandler(handler)

    config = load_user_config().logging

    # Captures warnings from the warnings module.
    logging.captureWarnings(True)

    if use_color is None:
        use_color = stream.isatty()
    stream_handler = _SetfaStreamHandler(stream)
    stream_handler.setFormatter(ColoredFormatter(use_color=use_color))
    root_logger.addHandler(stream_handler)
    root_logger.setLevel(logging._nameToLevel[(level or config.log_level).upper()])

    # Avoid junk logs from other libraries.
    if config.hide_third_party_logs:
        logging.getLogger("git").setLevel(logging.WARNING)
        logging.getLogger("numpy").setLevel(logging.WARNING)
