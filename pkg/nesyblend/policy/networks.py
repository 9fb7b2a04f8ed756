"""
Module comprising the neural networks of the agent.

@date: Oct 2026
"""

__all__ = [
    "layer_init",
    "ActorCritic",
    "ObjectCritic",
    "NeuralBlender",
]

import math

import torch
from torch import nn

from ..common.errors import DimensionError


def layer_init(layer, std=math.sqrt(2), bias=0.0):
    """Orthogonal weights and constant bias."""
    nn.init.orthogonal_(layer.weight, std)
    nn.init.constant_(layer.bias, bias)
    return layer


class ActorCritic(nn.Module):
    """
    Neural policy on stacked observation grids.

    A shared trunk (flatten -> 512 -> ReLU) feeds the actor head (|A| logits)
    and the raw-observation critic head.
    """

    def __init__(self, obs_shape, num_actions, hidden=512):
        super().__init__()
        self.obs_shape = tuple(obs_shape)
        self.num_actions = num_actions
        inputs = math.prod(self.obs_shape)
        self.trunk = nn.Sequential(
            nn.Flatten(),
            layer_init(nn.Linear(inputs, hidden)),
            nn.ReLU(),
        )
        self.actor = layer_init(nn.Linear(hidden, num_actions), std=0.01)
        self.critic = layer_init(nn.Linear(hidden, 1), std=1.0)

    def _features(self, x):
        if tuple(x.shape[-len(self.obs_shape):]) != self.obs_shape:
            raise DimensionError(f"observation shape {tuple(x.shape)} does not end with {self.obs_shape}")
        if x.dim() == len(self.obs_shape):
            x = x.unsqueeze(0)
        return self.trunk(x.to(self.actor.weight.dtype))

    def logits(self, x):
        return self.actor(self._features(x))

    def value(self, x):
        return self.critic(self._features(x)).squeeze(-1)

    def forward(self, x):
        features = self._features(x)
        return self.actor(features), self.critic(features).squeeze(-1)


class ObjectCritic(nn.Module):
    """Value of an object-centric state, n*m -> 120 -> 60 -> 1."""

    def __init__(self, num_objects, num_columns, hidden=(120, 60)):
        super().__init__()
        self.state_shape = (num_objects, num_columns)
        layers = [nn.Flatten()]
        size = num_objects * num_columns
        for width in hidden:
            layers += [layer_init(nn.Linear(size, width)), nn.ReLU()]
            size = width
        layers.append(layer_init(nn.Linear(size, 1), std=1.0))
        self.net = nn.Sequential(*layers)

    def forward(self, z):
        if tuple(z.shape[-2:]) != self.state_shape:
            raise DimensionError(f"object state shape {tuple(z.shape)} does not end with {self.state_shape}")
        if z.dim() == 2:
            z = z.unsqueeze(0)
        return self.net(z.to(self.net[-1].weight.dtype)).squeeze(-1)


class NeuralBlender(nn.Module):
    """Blend logit from the raw observation."""

    def __init__(self, obs_shape, hidden=64):
        super().__init__()
        self.obs_shape = tuple(obs_shape)
        self.net = nn.Sequential(
            nn.Flatten(),
            layer_init(nn.Linear(math.prod(self.obs_shape), hidden)),
            nn.ReLU(),
            layer_init(nn.Linear(hidden, 1), std=0.01),
        )

    def forward(self, x):
        if x.dim() == len(self.obs_shape):
            x = x.unsqueeze(0)
        return self.net(x.to(self.net[-1].weight.dtype)).squeeze(-1)
