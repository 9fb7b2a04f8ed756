"""
Module comprising general utilities.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .errors import *
from .logs import *
from .resources import *
