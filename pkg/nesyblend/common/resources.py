"""
Module comprising access to the packaged rule assets.

@date: Oct 2026
"""

__all__ = [
    "asset_path",
    "read_text",
    "text_digest",
]

import hashlib
import pathlib

ASSET_DIR = pathlib.Path(__file__).resolve().parent.parent / "assets"


def asset_path(name):
    """Path of a packaged asset file, e.g. ``kangaroo.rules``."""
    return ASSET_DIR / name


def read_text(path):
    """Read a UTF-8 source file."""
    with open(path, encoding="utf-8") as f:
        return f.read()


def text_digest(text):
    """sha256 hex digest of a source text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
