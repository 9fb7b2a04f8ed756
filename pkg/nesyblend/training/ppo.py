"""
Module comprising the PPO objective with blend-entropy regularization.

@date: Oct 2026
"""

__all__ = [
    "blend_entropy",
    "clipped_surrogate",
    "normalize_advantages",
    "ppo_objective",
    "apply_update",
]

import logging

import torch

from ..common.errors import ParameterError
from ..common.errors import TrainingError

logger = logging.getLogger(__name__)


def blend_entropy(beta):
    """Binary entropy of the blend weight in nats, with 0 log 0 = 0."""
    scalar = not torch.is_tensor(beta)
    beta_t = torch.as_tensor(beta, dtype=torch.float64) if scalar else beta
    if bool(((beta_t < 0) | (beta_t > 1)).any()):
        raise ParameterError(f"blend weight must be in [0, 1], got {beta}")
    entropy = -(torch.special.xlogy(beta_t, beta_t) + torch.special.xlogy(1.0 - beta_t, 1.0 - beta_t))
    return float(entropy) if scalar else entropy


def clipped_surrogate(ratio, advantages, clip_coef):
    """Per-sample ``min(r * A, clip(r, 1 - eps, 1 + eps) * A)``."""
    return torch.min(ratio * advantages, torch.clamp(ratio, 1.0 - clip_coef, 1.0 + clip_coef) * advantages)


def normalize_advantages(advantages, eps=1e-8):
    """Zero mean and unit standard deviation; constant advantages become 0."""
    centered = advantages - advantages.mean()
    if advantages.numel() < 2:
        return centered
    return centered / (advantages.std() + eps)


def ppo_objective(agent, minibatch, cfg):
    """
    Loss of one minibatch.

    ``loss = -surrogate + vf_coef * MSE(value, returns) - ent_coef * entropy
    - blend_ent_coef * blend_entropy(beta)``.

    Returns
    -------
    tuple
        Scalar loss tensor and a dict of float statistics.
    """
    log_prob, entropy, value, beta = agent.evaluate(minibatch["objects"], minibatch["raw"], minibatch["actions"])
    advantages = minibatch["advantages"].to(log_prob.dtype)
    if cfg.norm_adv:
        advantages = normalize_advantages(advantages)

    ratio = torch.exp(log_prob - minibatch["log_probs"].to(log_prob.dtype))
    loss_policy = -clipped_surrogate(ratio, advantages, cfg.clip_coef).mean()
    loss_value = ((value - minibatch["returns"].to(value.dtype))**2).mean()
    entropy = entropy.mean()
    blend_reg = blend_entropy(beta.clamp(0.0, 1.0)).mean()

    loss = loss_policy + cfg.vf_coef * loss_value - cfg.ent_coef * entropy - cfg.blend_ent_coef * blend_reg
    if not torch.isfinite(loss):
        raise TrainingError(
            f"non-finite loss (policy={float(loss_policy)}, value={float(loss_value)}, "
            f"entropy={float(entropy)}, blend={float(blend_reg)})"
        )

    with torch.no_grad():
        clip_frac = ((ratio - 1.0).abs() > cfg.clip_coef).float().mean()
    stats = {
        "loss_policy": float(loss_policy),
        "loss_value": float(loss_value),
        "entropy": float(entropy),
        "blend_reg": float(blend_reg),
        "clip_frac": float(clip_frac),
    }
    return loss, stats


def apply_update(loss, optimizer, parameters, max_grad_norm):
    """Backpropagate, clip the global gradient norm and step; returns the pre-clip norm."""
    optimizer.zero_grad()
    loss.backward()
    norm = torch.nn.utils.clip_grad_norm_(parameters, max_grad_norm)
    if not torch.isfinite(norm):
        optimizer.zero_grad()
        raise TrainingError(f"non-finite gradient norm {float(norm)}")
    optimizer.step()
    return float(norm)
