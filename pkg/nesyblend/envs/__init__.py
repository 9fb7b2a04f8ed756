"""
Module comprising the object-centric toy environments.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .base import *
from .kangaroo import *
from .seaquest import *
from .vector import *
