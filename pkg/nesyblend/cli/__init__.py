"""
Module comprising the run configuration, checkpoints and the command line.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .config import *
from .checkpoint import *
from .commands import *
from .main import main
