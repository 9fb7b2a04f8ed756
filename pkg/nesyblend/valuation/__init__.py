"""
Module comprising object-centric states and the valuation of state atoms.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .state import *
from .templates import *
from .registry import *
