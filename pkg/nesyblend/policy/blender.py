"""
Module comprising the blending module computing the weight beta.

@date: Oct 2026
"""

__all__ = [
    "BLEND_MODES",
    "Blender",
    "beta_from_values",
    "blend_weight",
]

import torch
from torch import nn

from ..common.errors import ConfigurationError
from .networks import NeuralBlender

BLEND_MODES = ("logic", "neural", "rigid")


def beta_from_values(v_neural, v_logic):
    """First entry of softmax([v_neural, v_logic])."""
    v_neural = torch.as_tensor(v_neural, dtype=torch.float64) if not torch.is_tensor(v_neural) else v_neural
    v_logic = torch.as_tensor(v_logic, dtype=v_neural.dtype) if not torch.is_tensor(v_logic) else v_logic
    return torch.sigmoid(v_neural - v_logic)


class Blender(nn.Module):
    """
    Weight beta of the neural policy against the logic policy.

    ``logic`` deduces beta from the blending rules, ``neural`` reads it from
    the raw observation, ``rigid`` thresholds the logic beta at 0.5.
    """

    def __init__(self, mode, obs_shape=None, logic=None):
        super().__init__()
        if mode not in BLEND_MODES:
            raise ConfigurationError(f"unknown blender mode {mode!r}, expected one of {BLEND_MODES}")
        self.mode = mode
        self.net = None
        if mode == "neural":
            if obs_shape is None:
                raise ConfigurationError("neural blender needs the observation shape")
            self.net = NeuralBlender(obs_shape)
        elif logic is not None and not logic.has_blending:
            raise ConfigurationError(f"{mode} blender needs neural/1 and logic/1 blending rules")

    def forward(self, atoms, x, logic):
        if self.mode == "neural":
            return torch.sigmoid(self.net(x))
        v_neural, v_logic = logic.blend_values(atoms)
        beta = beta_from_values(v_neural, v_logic)
        if self.mode == "rigid":
            return (beta > 0.5).to(beta.dtype)
        return beta


def blend_weight(z, x, blender, logic):
    """beta for one state or a batch of states."""
    atoms = logic.reason(z)
    beta = blender(atoms, x, logic)
    return beta.squeeze(0) if z.dim() == 2 else beta
