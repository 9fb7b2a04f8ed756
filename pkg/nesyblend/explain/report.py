"""
Module comprising per-state explanations and their text and table reports.

@date: Oct 2026
"""

__all__ = [
    "FiredRule",
    "Explanation",
    "fired_rules",
    "explain_state",
    "render_report",
    "write_explanation",
]

import dataclasses
import logging
import pathlib
from typing import List

import numpy as np
import pandas as pd
import torch

from ..reasoning.inference import forward_reason
from ..valuation.state import COLUMNS
from .attribution import logic_attribution
from .attribution import neural_attribution

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class FiredRule:
    score: float  # conjunction value times rule weight
    kind: str
    head: str
    text: str


@dataclasses.dataclass
class Explanation:
    """Both attributions of the chosen action, weighted by beta for display."""

    action: int
    action_name: str
    beta: float
    dist: np.ndarray
    logic_dist: np.ndarray
    neural_dist: np.ndarray
    rules: List[FiredRule]
    blend_rules: List[FiredRule]
    atom_attribution: np.ndarray
    property_attribution: np.ndarray
    neural_attribution: np.ndarray
    slot_names: tuple
    channel_names: tuple
    atom_names: tuple
    report: str = ""
    logic_target: str = "value"


TARGET_LABELS = {
    "value": "the deduced value of {action}",
    "prob": "p_logic({action})",
}

def fired_rules(logic, z, k=None, kind="action"):
    """
    Ground rules of ``kind`` by firing score, highest first.

    Ties keep ground-rule order.
    """
    dtype = logic.action_logits.dtype
    with torch.no_grad():
        weights = logic.rule_weights()
        x0 = logic.plan(torch.as_tensor(z, dtype=dtype))
        _, conj = forward_reason(logic.graph, x0, weights, logic.steps, logic.gamma, return_conj=True)
    gp = logic.program
    fired = []
    for j, gr in enumerate(gp.ground_rules):
        rule = gp.rules.rules[gr.rule]
        if rule.kind != kind:
            continue
        weight = float(weights[gr.rule])
        fired.append(FiredRule(
            score=float(conj[j]) * weight,
            kind=kind,
            head=rule.head.predicate.name,
            text=gp.rule_text(gr, weight),
        ))
    fired.sort(key=lambda r: -r.score)
    return fired if k is None else fired[:k]


def explain_state(z, x, agent, k=3, action=None, channel_names=None, ig_steps=64, logic_target="value"):
    """
    Explain the blended agent's decision in one state.

    Parameters
    ----------
    z : torch.Tensor
        Object state ``(n, m)``.
    x : torch.Tensor
        Raw observation ``(F, W, H, C)``.
    agent : BlendedAgent
        Agent to explain.
    k : int
        Number of fired rules reported.
    action : int, optional
        Action to explain, defaults to the most likely blended action.
    logic_target : {"value", "prob"}
        Whether the logic attribution differentiates the deduced action value
        or pi_logic(a | z).

    Returns
    -------
    Explanation
    """
    logic = agent.logic
    z = torch.as_tensor(z)
    x = torch.as_tensor(x)
    with torch.no_grad():
        output = agent(z, x)
    if action is None:
        action = int(torch.argmax(output.dist))

    logic_attr = logic_attribution(z, logic, action, target=logic_target)
    neural_attr = neural_attribution(x, agent.actor_critic, action, steps=ig_steps)

    blend_rules = fired_rules(logic, z, k, kind="blend") if logic.blend_logits.numel() else []
    explanation = Explanation(
        action=action,
        action_name=logic.action_names[action],
        beta=float(output.beta),
        dist=output.dist.detach().double().numpy(),
        logic_dist=output.logic_dist.detach().double().numpy(),
        neural_dist=output.neural_dist.detach().double().numpy(),
        rules=fired_rules(logic, z, k, kind="action"),
        blend_rules=blend_rules,
        atom_attribution=logic_attr.atoms.detach().double().numpy(),
        property_attribution=logic_attr.properties.detach().double().numpy(),
        neural_attribution=neural_attr.detach().double().numpy(),
        slot_names=tuple(logic.plan.slot_types),
        channel_names=tuple(channel_names or (f"c{i}" for i in range(x.shape[-1]))),
        atom_names=tuple(logic.program.atom_text(i) for i in range(logic.program.num_atoms)),
        logic_target=logic_target,
    )
    explanation.report = render_report(explanation)
    return explanation


def _logic_section(e):
    lines = [f"logic policy [weight {1.0 - e.beta:.4f}]: p({e.action_name}) = {e.logic_dist[e.action]:.4f}"]
    lines.append(f"  attributions of {TARGET_LABELS[e.logic_target].format(action=e.action_name)}")
    for rule in e.rules:
        lines.append(f"  {rule.score:.4f}  {rule.text}")
    order = np.argsort(-np.abs(e.property_attribution), axis=None, kind="stable")[:5]
    for flat in order:
        row, col = np.unravel_index(flat, e.property_attribution.shape)
        value = e.property_attribution[row, col]
        if value != 0.0:
            lines.append(f"  d/d {e.slot_names[row]}.{COLUMNS[col]} = {value:+.4f}")
    return lines


def _neural_section(e):
    attr = e.neural_attribution
    lines = [f"neural policy [weight {e.beta:.4f}]: p({e.action_name}) = {e.neural_dist[e.action]:.4f}"]
    lines.append(f"  integrated gradients total {attr.sum():+.4f}")
    if attr.size:
        frame, x, y, channel = np.unravel_index(np.argmax(np.abs(attr)), attr.shape)
        lines.append(f"  strongest cell frame={frame} x={x} y={y} channel={e.channel_names[channel]} "
                     f"({attr[frame, x, y, channel]:+.4f})")
    return lines


def render_report(e):
    """Text report; the policy with the larger weight comes first."""
    lines = [
        f"action: {e.action_name} (p={e.dist[e.action]:.4f})",
        f"beta: {e.beta:.4f} (neural {e.beta:.4f} / logic {1.0 - e.beta:.4f})",
    ]
    sections = [_logic_section(e), _neural_section(e)]
    if e.beta > 0.5:
        sections.reverse()
    for section in sections:
        lines += section
    if e.blend_rules:
        lines.append("blending rules:")
        for rule in e.blend_rules:
            lines.append(f"  {rule.score:.4f}  {rule.text}")
    return "\n".join(lines) + "\n"


def write_explanation(e, directory):
    """Write ``report.txt``, ``logic_attrib.csv`` and ``neural_attrib.csv``."""
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "report.txt", "w", encoding="utf-8") as f:
        f.write(e.report)

    pd.DataFrame(e.property_attribution, index=list(e.slot_names), columns=list(COLUMNS)) \
        .to_csv(directory / "logic_attrib.csv", index_label="object")

    frames, width, height, channels = e.neural_attribution.shape
    table = e.neural_attribution.transpose(0, 3, 1, 2).reshape(frames * channels * width, height)
    index = pd.MultiIndex.from_product(
        [range(frames), list(e.channel_names), range(width)],
        names=["frame", "channel", "x"],
    )
    pd.DataFrame(table, index=index, columns=[f"y{j}" for j in range(height)]) \
        .to_csv(directory / "neural_attrib.csv")
    return directory
