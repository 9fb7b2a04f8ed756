"""
Module comprising the differentiable logic policy.

@date: Oct 2026
"""

__all__ = [
    "LogicPolicy",
    "weight_to_logit",
    "action_softmax",
    "logic_action_distribution",
]

import logging
import math

import torch
from torch import nn

from ..common.errors import ConfigurationError
from ..logic.language import BLEND_PREDICATES
from ..reasoning.graph import build_graph
from ..reasoning.grounding import ground_program
from ..reasoning.inference import DEFAULT_GAMMA
from ..reasoning.inference import default_steps
from ..reasoning.inference import forward_reason
from ..reasoning.inference import softor
from ..valuation.registry import ValuationPlan

logger = logging.getLogger(__name__)

WEIGHT_EPS = 1e-6


def weight_to_logit(weight):
    """Inverse sigmoid, with weights kept off the exact bounds."""
    weight = min(max(float(weight), WEIGHT_EPS), 1.0 - WEIGHT_EPS)
    return math.log(weight / (1.0 - weight))


def action_softmax(values):
    """Action distribution from deduced action values."""
    if not torch.is_tensor(values):
        values = torch.as_tensor(values, dtype=torch.float64)
    return torch.softmax(values, dim=-1)


class LogicPolicy(nn.Module):
    """
    Weighted action and blending rules evaluated by soft forward chaining.

    Action-rule and blending-rule weights are separate parameters, stored as
    logits. Every action predicate of the language is one action, in
    declaration order.

    Parameters
    ----------
    rules : RuleSet
        Action rules, optionally with blending rules.
    registry : ValuationRegistry
        Valuations of the state predicates.
    slot_types : sequence of str
        Constant held by each object-state row.
    steps : int, optional
        Inference steps, defaults to the number of distinct predicates plus one.
    gamma : float
        softor smoothing.
    """

    def __init__(self, rules, registry, slot_types, steps=None, gamma=DEFAULT_GAMMA):
        super().__init__()
        self.rules = rules
        self.gamma = gamma
        self.steps = default_steps(rules) if steps is None else steps
        self.program = ground_program(rules)
        self.graph = build_graph(self.program)
        self.plan = ValuationPlan(registry, self.program, slot_types)

        lang = rules.language
        self.action_names = tuple(p.name for p in lang.action_predicates)
        if not self.action_names:
            raise ConfigurationError("the language declares no action predicates")
        self.action_atoms = []
        empty = []
        for name in self.action_names:
            indices = self.program.atoms_of(name)
            if not indices:
                empty.append(name)
            self.action_atoms.append(torch.tensor(indices, dtype=torch.long))
        if empty:
            raise ConfigurationError(f"action predicate(s) {empty} have no ground atoms")

        self.blend_atoms = {
            name: torch.tensor(self.program.atoms_of(name), dtype=torch.long)
            for name in BLEND_PREDICATES if lang.has_predicate(name)
        }

        action_idx = list(rules.action_rule_indices)
        blend_idx = list(rules.blend_rule_indices)
        self.action_logits = nn.Parameter(
            torch.tensor([weight_to_logit(rules.rules[i].weight) for i in action_idx], dtype=torch.float32))
        self.blend_logits = nn.Parameter(
            torch.tensor([weight_to_logit(rules.rules[i].weight) for i in blend_idx], dtype=torch.float32))
        order = torch.tensor(action_idx + blend_idx, dtype=torch.long)
        self._inverse = torch.argsort(order)

        logger.debug(
            "logic policy: %d ground atoms, %d ground rules, T=%d",
            self.program.num_atoms,
            len(self.program.ground_rules),
            self.steps,
        )

    @property
    def num_actions(self):
        return len(self.action_names)

    @property
    def has_blending(self):
        return len(self.blend_atoms) == len(BLEND_PREDICATES) and self.blend_logits.numel() > 0

    def rule_weights(self):
        """Weights of all rules in rule-file order, in [0, 1]."""
        weights = torch.sigmoid(torch.cat([self.action_logits, self.blend_logits]))
        return weights[self._inverse]

    def to_ruleset(self):
        """Rules carrying the current weights."""
        return self.rules.with_weights(self.rule_weights().detach().tolist())

    def initial_atoms(self, z):
        return self.plan(z.to(self.action_logits.dtype))

    def reason(self, z):
        """Atom values after forward chaining, ``(B, G)`` for ``(B, n, m)`` states."""
        return forward_reason(self.graph, self.initial_atoms(z), self.rule_weights(), self.steps, self.gamma)

    def action_values(self, atoms):
        """Per-action softor over the action's ground atoms, ``(..., |A|)``."""
        return torch.stack([softor(atoms[..., idx], self.gamma) for idx in self.action_atoms], dim=-1)

    def blend_values(self, atoms):
        """Values of the ``neural`` and ``logic`` blend atoms."""
        if not self.has_blending:
            raise ConfigurationError("logic blending needs neural/1 and logic/1 rules")
        return tuple(softor(atoms[..., self.blend_atoms[name]], self.gamma) for name in BLEND_PREDICATES)

    def forward(self, z):
        atoms = self.reason(z)
        return action_softmax(self.action_values(atoms)), atoms


def logic_action_distribution(z, policy):
    """pi_logic(a | z) for an object state ``(n, m)`` or a batch ``(B, n, m)``."""
    if not torch.is_tensor(z):
        z = z.tensor() if hasattr(z, "tensor") else torch.as_tensor(z)
    dist, _ = policy(z)
    return dist.squeeze(0) if z.dim() == 2 else dist
