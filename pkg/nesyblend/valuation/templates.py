"""
Module comprising the valuation function templates.

Every template maps a batch of object states ``z`` of shape ``(B, n, m)``
and the object rows of ``K`` ground atoms, shape ``(K, arity)``, to truth
values of shape ``(B, K)``. Objectness gating of non-player arguments is
applied by the caller.

@date: Oct 2026
"""

__all__ = [
    "TEMPLATES",
    "TEMPLATE_ALIASES",
    "template_for",
]

import torch

from .state import OBJECTNESS
from .state import VALUE
from .state import X
from .state import Y

TAU = 0.5


def _col(z, rows, arg, column):
    return z[:, rows[:, arg], column]


def _distance(z, rows):
    dx = _col(z, rows, 1, X) - _col(z, rows, 0, X)
    dy = _col(z, rows, 1, Y) - _col(z, rows, 0, Y)
    return torch.sqrt(dx * dx + dy * dy + 1e-12)


def closeby(z, rows, params, ctx):
    return torch.sigmoid((params["d"] - _distance(z, rows)) / params["tau"])


def left_of(z, rows, params, ctx):
    """Player (first argument) is left of the object."""
    return torch.sigmoid((_col(z, rows, 1, X) - _col(z, rows, 0, X)) / params["tau"])


def right_of(z, rows, params, ctx):
    return torch.sigmoid((_col(z, rows, 0, X) - _col(z, rows, 1, X)) / params["tau"])


def above(z, rows, params, ctx):
    """Player is above the object; y grows downwards."""
    return torch.sigmoid((_col(z, rows, 1, Y) - _col(z, rows, 0, Y)) / params["tau"])


def below(z, rows, params, ctx):
    return torch.sigmoid((_col(z, rows, 0, Y) - _col(z, rows, 1, Y)) / params["tau"])


def same_floor(z, rows, params, ctx):
    gap = torch.abs(_col(z, rows, 0, Y) - _col(z, rows, 1, Y))
    return torch.sigmoid((params["h"] - gap) / params["tau"])


def on_ladder(z, rows, params, ctx):
    offset = torch.abs(_col(z, rows, 0, X) - _col(z, rows, 1, X))
    return torch.sigmoid((params["w"] - offset) / params["tau"]) * same_floor(z, rows, params, ctx)


def is_empty(z, rows, params, ctx):
    return torch.sigmoid((params["alpha"] - _col(z, rows, 0, VALUE)) / params["tau"])


def full_divers(z, rows, params, ctx):
    return torch.sigmoid((_col(z, rows, 0, VALUE) - params["threshold"]) / params["scale"])


def not_full(z, rows, params, ctx):
    return 1.0 - full_divers(z, rows, params, ctx)


def nothing_around(z, rows, params, ctx):
    """Product over every object of ``of_type`` of (1 - closeby)."""
    others = ctx["type_rows"].get(params["of_type"], [])
    result = torch.ones(z.shape[0], rows.shape[0], dtype=z.dtype, device=z.device)
    for other in others:
        pair = torch.stack([rows[:, 0], torch.full_like(rows[:, 0], other)], dim=1)
        near = closeby(z, pair, params, ctx) * _col(z, pair, 1, OBJECTNESS)
        result = result * (1.0 - near)
    return result


def visible(z, rows, params, ctx):
    """Truth comes from objectness gating alone."""
    return torch.ones(z.shape[0], rows.shape[0], dtype=z.dtype, device=z.device)


# name -> (function, default parameters)
TEMPLATES = {
    "closeby": (closeby, {"d": 2.0, "tau": TAU}),
    "left_of": (left_of, {"tau": TAU}),
    "right_of": (right_of, {"tau": TAU}),
    "above": (above, {"tau": TAU}),
    "below": (below, {"tau": TAU}),
    "higher_than": (above, {"tau": TAU}),
    "deeper_than": (below, {"tau": TAU}),
    "same_floor": (same_floor, {"h": 0.5, "tau": TAU}),
    "on_ladder": (on_ladder, {"w": 0.5, "h": 0.5, "tau": TAU}),
    "is_empty": (is_empty, {"alpha": 16.0, "tau": 4.0}),
    "oxygen_low": (is_empty, {"alpha": 16.0, "tau": 4.0}),
    "full_divers": (full_divers, {"threshold": 5.5, "scale": 0.2}),
    "not_full": (not_full, {"threshold": 5.5, "scale": 0.2}),
    "nothing_around": (nothing_around, {"d": 2.0, "tau": TAU, "of_type": "enemy"}),
    "visible_diver": (visible, {}),
    "visible": (visible, {}),
}

TEMPLATE_ALIASES = {
    "close_by": "closeby",
    "close_by_enemy": "closeby",
    "not_full_divers": "not_full",
}


def template_for(name):
    """Template name used by default for a state predicate, or None."""
    name = TEMPLATE_ALIASES.get(name, name)
    return name if name in TEMPLATES else None
