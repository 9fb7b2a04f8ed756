"""
Module comprising PPO training of the blended agent.

@date: Oct 2026
"""
# pylint: disable=W0614,W0611,W0622
# flake8: noqa
# isort:skip_file

from .config import *
from .buffer import *
from .ppo import *
from .trainer import *
