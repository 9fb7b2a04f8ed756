"""
Module comprising soft forward chaining on a reasoning graph.

One inference step passes messages atom -> conjunction (product of body
values) and conjunction -> atom (weighted soft disjunction over all ground
rules deriving an atom, together with its previous value).

@date: Oct 2026
"""

__all__ = [
    "DEFAULT_GAMMA",
    "softor",
    "default_steps",
    "forward_reason",
    "reason_gradients",
    "forward_chain",
]

import torch

from ..common.errors import DimensionError
from ..common.errors import ParameterError

DEFAULT_GAMMA = 0.01


def softor(values, gamma=DEFAULT_GAMMA, dim=-1):
    """Smooth maximum ``gamma * log(sum(exp(x / gamma)))`` along ``dim``."""
    if gamma <= 0:
        raise ParameterError(f"softor needs gamma > 0, got {gamma}")
    if not torch.is_tensor(values):
        values = torch.as_tensor(values, dtype=torch.float64)
    if values.numel() == 0 or values.shape[dim] == 0:
        raise ParameterError("softor of an empty input")
    return gamma * torch.logsumexp(values / gamma, dim=dim)


def default_steps(rules):
    """Number of distinct predicates in the rules, plus one."""
    names = {a.predicate.name for r in rules.rules for a in (r.head, ) + r.body}
    return len(names) + 1


def _grouped_softor(prev, messages, heads, gamma):
    """softor over {prev[i]} and every message whose head is i."""
    index = heads.unsqueeze(0).expand_as(messages)
    peak = prev.scatter_reduce(1, index, messages, reduce="amax", include_self=True).detach()
    total = torch.exp((prev - peak) / gamma)
    total = total.scatter_add(1, index, torch.exp((messages - peak.gather(1, index)) / gamma))
    return peak + gamma * torch.log(total)


def forward_reason(graph, x0, weights, steps=1, gamma=DEFAULT_GAMMA, return_conj=False):
    """
    Run ``steps`` rounds of differentiable forward chaining.

    Parameters
    ----------
    graph : ReasoningGraph
        Graph of the ground program.
    x0 : torch.Tensor
        Initial atom values, shape ``(G,)`` or batched ``(B, G)``.
    weights : torch.Tensor
        One weight per source rule, shape ``(R,)``.
    steps : int
        Number of inference steps T.
    gamma : float
        softor smoothing.
    return_conj : bool
        Also return the conjunction-node values.

    Returns
    -------
    torch.Tensor
        Atom values after T steps, clamped to [0, 1], shaped like ``x0``.
        With ``return_conj``, a tuple of atom and conjunction values.
    """
    if gamma <= 0:
        raise ParameterError(f"gamma must be > 0, got {gamma}")
    if steps < 1:
        raise ParameterError(f"steps must be >= 1, got {steps}")
    if x0.shape[-1] != graph.num_atoms:
        raise DimensionError(f"x0 has {x0.shape[-1]} atoms, graph has {graph.num_atoms}")
    if weights.dim() != 1 or weights.shape[0] != graph.num_rules:
        raise DimensionError(f"expected {graph.num_rules} rule weights, got shape {tuple(weights.shape)}")

    single = x0.dim() == 1
    x = x0.unsqueeze(0) if single else x0
    if graph.num_conj == 0:
        out = x0.clamp(0.0, 1.0)
        if return_conj:
            return out, x0.new_zeros(x0.shape[:-1] + (0, ))
        return out

    batch = x.shape[0]
    edge_weights = weights[graph.conj_rule]
    ones = torch.ones(batch, 1, dtype=x.dtype, device=x.device)
    conj = torch.zeros(batch, graph.num_conj, dtype=x.dtype, device=x.device)

    for _ in range(steps):
        padded = torch.cat([x, ones], dim=1)
        body = padded[:, graph.body_index].prod(dim=-1)
        conj = (gamma * torch.logaddexp(conj / gamma, body / gamma)).clamp(0.0, 1.0)
        x = _grouped_softor(x, edge_weights * conj, graph.heads, gamma).clamp(0.0, 1.0)

    if single:
        x, conj = x.squeeze(0), conj.squeeze(0)
    return (x, conj) if return_conj else x


def reason_gradients(graph, x0, weights, steps=1, gamma=DEFAULT_GAMMA):
    """
    Jacobians of every output atom w.r.t. rule weights and input atoms.

    Returns
    -------
    tuple of torch.Tensor
        ``(d out / d weights)`` of shape ``(G, R)`` and ``(d out / d x0)`` of shape ``(G, G)``.
    """
    if x0.dim() != 1:
        raise DimensionError("reason_gradients takes a single state, x0 must be 1-D")
    jac_w, jac_x = torch.autograd.functional.jacobian(
        lambda w, x: forward_reason(graph, x, w, steps=steps, gamma=gamma),
        (weights.detach(), x0.detach()),
    )
    return jac_w, jac_x


def forward_chain(gp, facts, steps=None):
    """
    Classical T_C closure of a ground program.

    ``facts`` are atom indices taken as true; returns the set of atom indices
    derivable in at most ``steps`` applications (fixpoint when None).
    """
    derived = set(facts)
    remaining = steps if steps is not None else len(gp.ground_rules) + 1
    while remaining > 0:
        new = {gr.head for gr in gp.ground_rules if all(i in derived for i in gr.body)}
        if new <= derived:
            break
        derived |= new
        remaining -= 1
    return derived
