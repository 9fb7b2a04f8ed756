"""
Module comprising the logic, neural and blended policies.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .networks import *
from .logic import *
from .blender import *
from .agent import *
