"""
Module comprising the typed first-order language and the weighted-rule DSL.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .language import *
from .parser import *
