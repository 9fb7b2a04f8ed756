"""
Module comprising rollout storage and advantage estimation.

@date: Oct 2026
"""

__all__ = [
    "RolloutBuffer",
    "compute_advantages",
]

import torch

from ..common.errors import UsageError


def compute_advantages(rewards, values, dones, last_value, gamma=0.99, gae_lambda=0.95):
    """
    Generalized advantage estimates and returns.

    Parameters
    ----------
    rewards, values, dones : torch.Tensor
        Shape ``(T,)`` or ``(T, N)``. ``dones[t]`` marks that the episode
        ended with the transition taken at step t.
    last_value : torch.Tensor
        Value of the state reached after the last step, shape ``()`` or ``(N,)``.
    gamma, gae_lambda : float
        Discount and GAE parameter.

    Returns
    -------
    tuple of torch.Tensor
        Advantages and returns (advantages + values), shaped like ``rewards``.
    """
    rewards = torch.as_tensor(rewards, dtype=torch.float64)
    values = torch.as_tensor(values, dtype=torch.float64)
    dones = torch.as_tensor(dones, dtype=torch.float64)
    last_value = torch.as_tensor(last_value, dtype=torch.float64)

    advantages = torch.zeros_like(rewards)
    running = torch.zeros_like(rewards[0])
    for t in reversed(range(rewards.shape[0])):
        next_value = last_value if t == rewards.shape[0] - 1 else values[t + 1]
        nonterminal = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        running = delta + gamma * gae_lambda * nonterminal * running
        advantages[t] = running
    return advantages, advantages + values


class RolloutBuffer:
    """Transitions of ``num_envs`` environments over ``num_steps`` steps."""

    FIELDS = ("objects", "raw", "actions", "log_probs", "rewards", "dones", "values", "betas")

    def __init__(self, num_steps, num_envs, objects_shape, raw_shape):
        self.num_steps = num_steps
        self.num_envs = num_envs
        self.objects = torch.zeros((num_steps, num_envs) + tuple(objects_shape))
        self.raw = torch.zeros((num_steps, num_envs) + tuple(raw_shape))
        self.actions = torch.zeros(num_steps, num_envs, dtype=torch.long)
        for name in ("log_probs", "rewards", "dones", "values", "betas"):
            setattr(self, name, torch.zeros(num_steps, num_envs))
        self.pos = 0

    @property
    def full(self):
        return self.pos == self.num_steps

    def add(self, objects, raw, actions, log_probs, rewards, dones, values, betas):
        if self.full:
            raise UsageError("rollout buffer is full")
        step = self.pos
        self.objects[step] = torch.as_tensor(objects)
        self.raw[step] = torch.as_tensor(raw)
        self.actions[step] = torch.as_tensor(actions)
        self.log_probs[step] = torch.as_tensor(log_probs, dtype=torch.float32)
        self.rewards[step] = torch.as_tensor(rewards, dtype=torch.float32)
        self.dones[step] = torch.as_tensor(dones, dtype=torch.float32)
        self.values[step] = torch.as_tensor(values, dtype=torch.float32)
        self.betas[step] = torch.as_tensor(betas, dtype=torch.float32)
        self.pos += 1

    def reset(self):
        self.pos = 0

    def advantages(self, last_value, gamma, gae_lambda):
        if not self.full:
            raise UsageError(f"rollout buffer holds {self.pos} of {self.num_steps} steps")
        return compute_advantages(self.rewards, self.values, self.dones, last_value, gamma, gae_lambda)

    def flatten(self, advantages, returns):
        """Batch of ``num_steps * num_envs`` samples for the update."""
        batch = {name: getattr(self, name).reshape((-1, ) + getattr(self, name).shape[2:]) for name in self.FIELDS}
        batch["advantages"] = advantages.reshape(-1).to(torch.float32)
        batch["returns"] = returns.reshape(-1).to(torch.float32)
        return batch
