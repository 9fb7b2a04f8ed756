"""
Module comprising grounding and differentiable forward reasoning.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .grounding import *
from .graph import *
from .inference import *
