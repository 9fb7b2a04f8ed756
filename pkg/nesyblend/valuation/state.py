"""
Module comprising the object-centric state matrix.

@date: Oct 2026
"""

__all__ = [
    "ObjectState",
    "COLUMNS",
    "OBJECTNESS",
    "X",
    "Y",
    "ORIENTATION",
    "VALUE",
]

import dataclasses
from typing import Tuple

import numpy as np
import torch

COLUMNS = ("objectness", "x", "y", "orientation", "value")
OBJECTNESS, X, Y, ORIENTATION, VALUE = range(len(COLUMNS))


@dataclasses.dataclass
class ObjectState:
    """
    One row per object slot with the columns of ``COLUMNS``.

    ``slot_types`` names the language constant held by each row, so that
    ground atoms can be mapped to rows. Properties that do not apply to an
    object are 0.
    """

    values: np.ndarray
    slot_types: Tuple[str, ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.slot_types = tuple(self.slot_types)
        if self.values.ndim != 2 or self.values.shape[1] != len(COLUMNS):
            raise ValueError(f"object state must be (n, {len(COLUMNS)}), got {self.values.shape}")
        if self.values.shape[0] != len(self.slot_types):
            raise ValueError("one slot type per object row is required")

    @property
    def num_objects(self):
        return self.values.shape[0]

    def row(self, constant):
        return self.slot_types.index(constant)

    def get(self, constant, column):
        return self.values[self.row(constant), COLUMNS.index(column)]

    def tensor(self, dtype=torch.float64):
        return torch.as_tensor(self.values, dtype=dtype)

    def to_frame(self):
        """Table view with object names as index."""
        import pandas as pd
        return pd.DataFrame(self.values, index=list(self.slot_types), columns=list(COLUMNS))
