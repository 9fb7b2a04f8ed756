"""
Module comprising the training hyperparameters.

@date: Oct 2026
"""

__all__ = [
    "TrainConfig",
    "freeze",
    "force_beta",
]

import dataclasses
from typing import Optional
from typing import Tuple

from ..common.errors import ConfigurationError
from ..policy.agent import PARAMETER_GROUPS


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """PPO hyperparameters; defaults follow the desk-scale setup."""

    gamma: float = 0.99
    gae_lambda: float = 0.95
    learning_rate: float = 2.5e-4
    logic_learning_rate: float = 2.5e-4
    blender_learning_rate: float = 2.5e-4
    clip_coef: float = 0.1
    ent_coef: float = 0.01
    blend_ent_coef: float = 0.01
    vf_coef: float = 0.5
    max_grad_norm: float = 0.5
    num_envs: int = 8
    num_steps: int = 128
    total_timesteps: int = 300_000
    update_epochs: int = 4
    num_minibatches: int = 4
    norm_adv: bool = True
    seed: int = 0
    frozen: Tuple[str, ...] = ()
    force_beta: Optional[float] = None
    checkpoint_every: int = 0
    torch_threads: int = 1
    env_workers: int = 0

    @property
    def batch_size(self):
        return self.num_envs * self.num_steps

    @property
    def minibatch_size(self):
        return self.batch_size // self.num_minibatches

    @property
    def num_iterations(self):
        return self.total_timesteps // self.batch_size

    def learning_rates(self):
        return {
            "neural": self.learning_rate,
            "logic": self.logic_learning_rate,
            "blender": self.blender_learning_rate,
        }

    def problems(self):
        """Every constraint violation, as text."""
        problems = []
        if not 0.0 < self.gamma <= 1.0:
            problems.append(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0.0 <= self.gae_lambda <= 1.0:
            problems.append(f"gae_lambda must be in [0, 1], got {self.gae_lambda}")
        for name in ("learning_rate", "logic_learning_rate", "blender_learning_rate", "clip_coef", "ent_coef",
                     "blend_ent_coef", "vf_coef", "max_grad_norm"):
            if getattr(self, name) < 0:
                problems.append(f"{name} must be >= 0, got {getattr(self, name)}")
        for name in ("num_envs", "num_steps", "update_epochs", "num_minibatches", "torch_threads"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.num_envs >= 1 and self.num_steps >= 1 and self.num_minibatches >= 1:
            if self.batch_size % self.num_minibatches:
                problems.append(f"batch size {self.batch_size} is not divisible by {self.num_minibatches} minibatches")
            if self.total_timesteps < self.batch_size:
                problems.append(f"total_timesteps {self.total_timesteps} is below one batch ({self.batch_size})")
        unknown = [g for g in self.frozen if g not in PARAMETER_GROUPS]
        if unknown:
            problems.append(f"unknown parameter group(s) {unknown}, expected {PARAMETER_GROUPS}")
        if self.force_beta is not None and not 0.0 <= self.force_beta <= 1.0:
            problems.append(f"force_beta must be in [0, 1], got {self.force_beta}")
        if self.checkpoint_every < 0 or self.env_workers < 0:
            problems.append("checkpoint_every and env_workers must be >= 0")
        return problems

    def validate(self):
        problems = self.problems()
        if problems:
            raise ConfigurationError("invalid training configuration", problems)
        return self


def freeze(cfg, group):
    """Config with one more parameter group excluded from updates."""
    if group not in PARAMETER_GROUPS:
        raise ConfigurationError(f"unknown parameter group {group!r}, expected {PARAMETER_GROUPS}")
    return dataclasses.replace(cfg, frozen=tuple(sorted(set(cfg.frozen) | {group})))


def force_beta(cfg, beta):
    """
    Config with a constant blend weight.

    The blender no longer receives gradients. ``beta=1`` trains the neural
    policy alone and ``beta=0`` only the rule weights and the object critic.
    """
    frozen = set(cfg.frozen) | {"blender"}
    if beta == 1.0:
        frozen.add("logic")
    elif beta == 0.0:
        frozen.add("neural")
    return dataclasses.replace(cfg, force_beta=float(beta), frozen=tuple(sorted(frozen)))
