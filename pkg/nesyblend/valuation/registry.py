"""
Module comprising the valuation registry and state-atom evaluation.

@date: Oct 2026
"""

__all__ = [
    "Valuation",
    "ValuationRegistry",
    "ValuationPlan",
    "evaluate_state_atoms",
    "valuation_gradients",
]

import copy
import dataclasses
import logging
from typing import Dict

import torch

from ..common.errors import ConfigurationError
from ..common.errors import DimensionError
from .state import OBJECTNESS
from .state import ObjectState
from .templates import TEMPLATES
from .templates import template_for

logger = logging.getLogger(__name__)

PLAYER_TYPE = "player"


@dataclasses.dataclass
class Valuation:
    template: str
    params: Dict[str, object]

    @property
    def function(self):
        return TEMPLATES[self.template][0]


@dataclasses.dataclass
class ValuationRegistry:
    """State predicate name -> valuation template and its fixed parameters."""

    entries: Dict[str, Valuation] = dataclasses.field(default_factory=dict)

    @classmethod
    def for_language(cls, lang, overrides=None):
        """
        Register the default template of every state predicate.

        ``overrides`` maps ``"<predicate>.<param>"`` (or nested dicts) to
        values; ``"<predicate>.template"`` selects another template.
        """
        overrides = _flatten(overrides or {})
        registry = cls()
        for pred in lang.state_predicates:
            name = overrides.get(f"{pred.name}.template") or template_for(pred.name)
            if name is None:
                continue
            if name not in TEMPLATES:
                raise ConfigurationError(f"unknown valuation template {name!r} for {pred.name!r}")
            registry.entries[pred.name] = Valuation(name, copy.deepcopy(TEMPLATES[name][1]))

        problems = []
        for key, value in overrides.items():
            pred_name, _, param = key.partition(".")
            if param == "template":
                continue
            if pred_name not in registry.entries:
                problems.append(f"valuation override {key!r} names no registered predicate")
            elif param not in registry.entries[pred_name].params:
                problems.append(f"valuation override {key!r}: {pred_name!r} has no parameter {param!r}")
            else:
                registry.entries[pred_name].params[param] = value
        if problems:
            raise ConfigurationError("invalid valuation overrides", problems)
        return registry

    def missing(self, lang):
        """State predicates of ``lang`` without a valuation."""
        return [p.name for p in lang.state_predicates if p.name not in self.entries]

    def params(self, predicate):
        return self.entries[predicate].params


def _flatten(tree, prefix=""):
    flat = {}
    for key, value in tree.items():
        full = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, full + "."))
        else:
            flat[full] = value
    return flat


class ValuationPlan:
    """
    Evaluation of every ground state atom of a program, grouped by predicate.

    Built once per (registry, ground program, slot layout) and then applied
    to batches of object states.
    """

    def __init__(self, registry, gp, slot_types):
        self.num_atoms = gp.num_atoms
        self.slot_types = tuple(slot_types)
        lang = gp.language

        unregistered = [p.name for p in lang.state_predicates if gp.atoms_of(p.name) and p.name not in registry.entries]
        if unregistered:
            raise ConfigurationError(f"no valuation registered for state predicate(s) {unregistered}")

        slot = {name: i for i, name in enumerate(self.slot_types)}
        self.type_rows = {}
        for const in lang.constants:
            if const.name in slot:
                self.type_rows.setdefault(const.type, []).append(slot[const.name])

        self.groups = []
        missing = set()
        for pred in lang.state_predicates:
            indices = gp.atoms_of(pred.name)
            if not indices:
                continue
            rows, gates = [], []
            for idx in indices:
                args = gp.atoms[idx][1]
                missing.update(a for a in args if a not in slot)
                rows.append([slot.get(a, 0) for a in args])
                gates.append([slot.get(a, 0) for a, t in zip(args, pred.arg_types) if t != PLAYER_TYPE])
            width = len(gates[0])
            self.groups.append((
                pred.name,
                registry.entries[pred.name],
                torch.tensor(indices, dtype=torch.long),
                torch.tensor(rows, dtype=torch.long),
                torch.tensor(gates, dtype=torch.long).reshape(len(indices), width),
            ))
        if missing:
            raise ConfigurationError(f"object state has no slot for constant(s) {sorted(missing)}")

    def __call__(self, z):
        """Atom values ``(B, G)`` (or ``(G,)``) for object states ``(B, n, m)`` (or ``(n, m)``)."""
        single = z.dim() == 2
        if single:
            z = z.unsqueeze(0)
        if z.shape[1] != len(self.slot_types):
            raise DimensionError(f"object state has {z.shape[1]} rows, expected {len(self.slot_types)}")

        ctx = {"type_rows": self.type_rows}
        out = torch.zeros(z.shape[0], self.num_atoms, dtype=z.dtype, device=z.device)
        if self.groups:
            values, indices = [], []
            for _, valuation, idx, rows, gates in self.groups:
                value = valuation.function(z, rows, valuation.params, ctx)
                for j in range(gates.shape[1]):
                    value = value * z[:, gates[:, j], OBJECTNESS]
                values.append(value)
                indices.append(idx)
            out = out.index_copy(1, torch.cat(indices), torch.cat(values, dim=1))
        return out.squeeze(0) if single else out


def _as_tensor(z, slot_types):
    if isinstance(z, ObjectState):
        return z.tensor(), z.slot_types
    if slot_types is None:
        raise ValueError("slot_types are required when z is a bare tensor")
    return torch.as_tensor(z, dtype=torch.float64) if not torch.is_tensor(z) else z, tuple(slot_types)


def evaluate_state_atoms(z, reg, gp, slot_types=None):
    """
    Truth values of the ground state atoms of ``gp`` in state ``z``.

    Action and blend atoms are 0. Every value is multiplied by the
    objectness of each non-player argument.
    """
    z, slot_types = _as_tensor(z, slot_types)
    return ValuationPlan(reg, gp, slot_types)(z)


def valuation_gradients(z, reg, gp, slot_types=None):
    """Jacobian of the atom values w.r.t. a single object state, shape ``(G, n, m)``."""
    z, slot_types = _as_tensor(z, slot_types)
    if z.dim() != 2:
        raise DimensionError("valuation_gradients takes a single (n, m) object state")
    plan = ValuationPlan(reg, gp, slot_types)
    return torch.autograd.functional.jacobian(plan, z.detach())
