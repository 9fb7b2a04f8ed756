"""
Module comprising logic and neural explanations of the blended agent.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .attribution import *
from .report import *
