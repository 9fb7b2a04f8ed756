"""
Module comprising gradient attributions of the logic and neural policies.

@date: Oct 2026
"""

__all__ = [
    "LogicAttribution",
    "logic_attribution",
    "integrated_gradients",
    "neural_attribution",
]

import dataclasses

import torch

from ..common.errors import UsageError
from ..policy.logic import action_softmax
from ..reasoning.inference import forward_reason
from ..reasoning.inference import reason_gradients

TARGETS = ("value", "prob")


@dataclasses.dataclass
class LogicAttribution:
    """Gradients of one action's logic score w.r.t. input atoms and object properties."""

    action: int
    target: str
    score: float
    atoms: torch.Tensor  # (G,)
    properties: torch.Tensor  # (n, m)


def logic_attribution(z, logic, action, target="value"):
    """
    Attribute a logic-policy action to state atoms and object properties.

    The gradient of the target w.r.t. the reasoning output is chained through
    the reasoning Jacobian to the input atoms and then through the valuation
    Jacobian to the object state.

    Parameters
    ----------
    z : torch.Tensor
        Single object state ``(n, m)``.
    logic : LogicPolicy
        Logic policy.
    action : int
        Action index.
    target : {"value", "prob"}
        Deduced action value, or pi_logic(a | z).

    Returns
    -------
    LogicAttribution
    """
    if not 0 <= action < logic.num_actions:
        raise UsageError(f"action {action} outside 0..{logic.num_actions - 1}")
    if target not in TARGETS:
        raise UsageError(f"unknown attribution target {target!r}, expected one of {TARGETS}")

    dtype = logic.action_logits.dtype
    z = torch.as_tensor(z, dtype=dtype).detach()
    weights = logic.rule_weights().detach()
    x0 = logic.plan(z).detach()

    _, jac_atoms = reason_gradients(logic.graph, x0, weights, logic.steps, logic.gamma)

    out = forward_reason(logic.graph, x0, weights, logic.steps, logic.gamma).requires_grad_(True)
    values = logic.action_values(out)
    score = values[action] if target == "value" else action_softmax(values)[action]
    (grad_out, ) = torch.autograd.grad(score, out)

    atoms = grad_out @ jac_atoms
    valuation_jac = torch.autograd.functional.jacobian(logic.plan, z)
    properties = torch.einsum("g,gnm->nm", atoms, valuation_jac)
    return LogicAttribution(action, target, float(score), atoms, properties)


def integrated_gradients(x, fn, action, steps=64, baseline=None):
    """
    Integrated gradients of ``fn(x)[action]`` along the straight path from
    ``baseline`` (all zeros by default), midpoint rule with ``steps`` points.

    ``fn`` maps a batch ``(S, *x.shape)`` to outputs ``(S, A)``.
    """
    x = torch.as_tensor(x).detach()
    baseline = torch.zeros_like(x) if baseline is None else torch.as_tensor(baseline, dtype=x.dtype)
    alphas = (torch.arange(steps, dtype=x.dtype) + 0.5) / steps
    shape = (steps, ) + (1, ) * x.dim()
    path = (baseline.unsqueeze(0) + alphas.reshape(shape) * (x - baseline).unsqueeze(0)).requires_grad_(True)
    outputs = fn(path)[:, action]
    (grads, ) = torch.autograd.grad(outputs.sum(), path)
    return (x - baseline) * grads.mean(dim=0)


def neural_attribution(x, net, action, steps=64, baseline=None):
    """Integrated gradients of pi_neural(a | x) for the actor of ``net``."""
    dtype = net.actor.weight.dtype
    return integrated_gradients(
        torch.as_tensor(x, dtype=dtype),
        lambda batch: torch.softmax(net.logits(batch), dim=-1),
        action,
        steps=steps,
        baseline=baseline,
    )
