"""
Module comprising logging setup and the metrics stream.

@date: Oct 2026
"""

__all__ = [
    "setup_logging",
    "JsonLinesWriter",
    "dumps_record",
]

import json
import logging
import math
import pathlib

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level=logging.INFO):
    """Attach a single stream handler to the package logger."""
    logger = logging.getLogger("nesyblend")
    logger.setLevel(level)
    if not any(isinstance(h, logging.StreamHandler) for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    return logger


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def dumps_record(record):
    """Serialize a flat record deterministically, non-finite floats as null."""
    return json.dumps({k: _jsonable(v) for k, v in record.items()}, sort_keys=True)


class JsonLinesWriter:
    """Append-only writer of one JSON object per line."""

    def __init__(self, path):
        self.path = pathlib.Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def write(self, record):
        line = dumps_record(record)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(line + "\n")
        return line
