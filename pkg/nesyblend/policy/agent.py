"""
Module comprising the blended neuro-symbolic agent.

@date: Oct 2026
"""

__all__ = [
    "BlendedPolicyOutput",
    "BlendedAgent",
    "neural_action_distribution",
    "blended_step",
    "sample_action",
    "PARAMETER_GROUPS",
]

import dataclasses
import logging

import torch
from torch import nn

from ..common.errors import ParameterError
from .blender import Blender
from .networks import ActorCritic
from .networks import ObjectCritic

logger = logging.getLogger(__name__)

PARAMETER_GROUPS = ("neural", "logic", "blender")


@dataclasses.dataclass
class BlendedPolicyOutput:
    """Mixed action distribution with the pieces it was built from."""

    dist: torch.Tensor
    beta: torch.Tensor
    value: torch.Tensor
    logic_dist: torch.Tensor
    neural_dist: torch.Tensor
    atom_values: torch.Tensor


class BlendedAgent(nn.Module):
    """
    Neural and logic policies mixed by a state-dependent weight beta.

    ``dist = beta * neural + (1 - beta) * logic`` and the hybrid value
    ``beta * V_raw(x) + (1 - beta) * V_OC(z)``.
    """

    def __init__(self, logic, obs_shape, num_objects, num_columns, blend_mode="logic", force_beta=None):
        super().__init__()
        if force_beta is not None and not 0.0 <= force_beta <= 1.0:
            raise ParameterError(f"forced beta must be in [0, 1], got {force_beta}")
        self.logic = logic
        self.actor_critic = ActorCritic(obs_shape, logic.num_actions)
        self.object_critic = ObjectCritic(num_objects, num_columns)
        self.blender = Blender(blend_mode, obs_shape, logic if force_beta is None else None)
        self.force_beta = force_beta

    @property
    def num_actions(self):
        return self.logic.num_actions

    @property
    def blend_mode(self):
        return self.blender.mode

    def parameter_groups(self):
        """Trainable parameters split into the neural, logic and blender groups."""
        return {
            "neural": list(self.actor_critic.parameters()),
            "logic": [self.logic.action_logits] + list(self.object_critic.parameters()),
            "blender": [self.logic.blend_logits] + list(self.blender.parameters()),
        }

    def beta(self, atoms, x):
        if self.force_beta is not None:
            return torch.full((atoms.shape[0], ), float(self.force_beta), dtype=atoms.dtype, device=atoms.device)
        return self.blender(atoms, x, self.logic)

    def forward(self, z, x):
        single = z.dim() == 2
        if single:
            z, x = z.unsqueeze(0), x.unsqueeze(0)

        logic_dist, atoms = self.logic(z)
        neural_logits, raw_value = self.actor_critic(x)
        neural_dist = torch.softmax(neural_logits, dim=-1).to(logic_dist.dtype)
        beta = self.beta(atoms, x).to(logic_dist.dtype)
        oc_value = self.object_critic(z)

        b = beta.unsqueeze(-1)
        output = BlendedPolicyOutput(
            dist=b * neural_dist + (1.0 - b) * logic_dist,
            beta=beta,
            value=beta * raw_value.to(beta.dtype) + (1.0 - beta) * oc_value.to(beta.dtype),
            logic_dist=logic_dist,
            neural_dist=neural_dist,
            atom_values=atoms,
        )
        if single:
            output = BlendedPolicyOutput(*(getattr(output, f.name).squeeze(0) for f in dataclasses.fields(output)))
        return output

    def evaluate(self, z, x, actions):
        """Log-probabilities of taken actions, policy entropy, hybrid value and beta."""
        output = self(z, x)
        dist = output.dist.clamp_min(1e-12)
        log_prob = torch.log(dist.gather(-1, actions.long().unsqueeze(-1)).squeeze(-1))
        entropy = -(output.dist * torch.log(dist)).sum(-1)
        return log_prob, entropy, output.value, output.beta


def neural_action_distribution(x, net):
    """pi_neural(a | x) from the actor logits."""
    probs = torch.softmax(net.logits(x), dim=-1)
    return probs.squeeze(0) if x.dim() == len(net.obs_shape) else probs


def blended_step(z, x, agent):
    """One forward pass of the blended policy."""
    return agent(z, x)


def sample_action(output, seed=None, generator=None):
    """
    Sample actions from the mixed distribution.

    Parameters
    ----------
    output : BlendedPolicyOutput or torch.Tensor
        Policy output, or a probability tensor ``(|A|,)`` / ``(B, |A|)``.
    seed : int, optional
        Seed of a fresh generator.
    generator : torch.Generator, optional
        Generator to draw from; takes precedence over ``seed``.

    Returns
    -------
    tuple of torch.Tensor
        Sampled action indices and their log-probabilities.
    """
    dist = output.dist if isinstance(output, BlendedPolicyOutput) else output
    if generator is None:
        generator = torch.Generator()
        generator.manual_seed(0 if seed is None else int(seed))
    probs = dist.detach()
    single = probs.dim() == 1
    if single:
        probs = probs.unsqueeze(0)
    actions = torch.multinomial(probs.to(torch.float64), 1, generator=generator).squeeze(-1)
    log_prob = torch.log(probs.gather(-1, actions.unsqueeze(-1)).squeeze(-1))
    if single:
        return actions[0], log_prob[0]
    return actions, log_prob
