"""
Module comprising the shared machinery of the grid environments.

@date: Oct 2026
"""

__all__ = [
    "Modification",
    "EnvSpec",
    "GridEnv",
    "apply_objectness_noise",
    "MAX_NOISE",
]

import collections
import copy
import dataclasses
import logging
from typing import Tuple

import gymnasium
import numpy as np
from gymnasium import spaces

from ..common.errors import SpecError
from ..common.errors import UsageError
from ..valuation.state import COLUMNS
from ..valuation.state import OBJECTNESS
from ..valuation.state import ObjectState

logger = logging.getLogger(__name__)

MAX_NOISE = 0.5


def apply_objectness_noise(z, rate, rng):
    """
    Hide detected objects at random.

    Every non-player row (row 0 is the player) has its objectness set to 0
    independently with probability ``rate``. Returns a new array.
    """
    if not 0.0 <= rate <= MAX_NOISE:
        raise SpecError(f"objectness noise rate must be in [0, {MAX_NOISE}], got {rate}")
    values = z.values if isinstance(z, ObjectState) else z
    values = np.array(values, copy=True)
    if rate > 0.0:
        drop = rng.random(values.shape[0] - 1) < rate
        values[1:, OBJECTNESS][drop] = 0.0
    if isinstance(z, ObjectState):
        return ObjectState(values, z.slot_types)
    return values


@dataclasses.dataclass(frozen=True)
class Modification:
    """Environment variation flags and the evaluation-time objectness noise."""

    flags: Tuple[str, ...] = ()
    noise: float = 0.0

    @classmethod
    def parse(cls, flags=None, noise=0.0):
        """Build from a comma-separated string or a list of flag names."""
        if isinstance(flags, str):
            flags = [f for f in flags.split(",") if f.strip()]
        return cls(tuple(sorted(f.strip() for f in flags or ())), float(noise))

    def __contains__(self, flag):
        return flag in self.flags


@dataclasses.dataclass(frozen=True)
class EnvSpec:
    name: str = "mini-kangaroo"
    width: int = 16
    height: int = 12
    max_steps: int = 512
    frame_stack: int = 4
    modification: Modification = Modification()
    seed: int = 0

    def with_modification(self, flags=None, noise=0.0):
        return dataclasses.replace(self, modification=Modification.parse(flags, noise))

    def problems(self, allowed_flags):
        """Every problem with these settings, given the flags the environment supports."""
        problems = []
        unknown = [f for f in self.modification.flags if f not in allowed_flags]
        if unknown:
            problems.append(f"{self.name} does not support flag(s) {unknown}; allowed: {sorted(allowed_flags)}")
        if not 0.0 <= self.modification.noise <= MAX_NOISE:
            problems.append(f"objectness noise must be in [0, {MAX_NOISE}], got {self.modification.noise}")
        if self.width < 8 or self.height < 8:
            problems.append(f"grid must be at least 8x8, got {self.width}x{self.height}")
        if self.max_steps < 1:
            problems.append("max_steps must be positive")
        if self.frame_stack < 1:
            problems.append("frame_stack must be positive")
        return problems


class GridEnv(gymnasium.Env):
    """
    Episodic grid world with a stacked occupancy-grid observation and an
    object-centric state.

    Observations are dicts with ``raw`` of shape ``(F, W, H, C)`` and
    ``objects`` of shape ``(n, 5)``. Subclasses define the world through
    ``_reset_world``, ``_advance``, ``_objects``, ``_render`` and the
    ``_world_state`` / ``_load_world_state`` pair.
    """

    metadata = {"render_modes": []}

    NAME = ""
    ACTIONS = ()
    SLOTS = ()
    CHANNELS = ()
    FLAGS = frozenset()
    VALUATION_OVERRIDES = {}

    def __init__(self, spec=None):
        super().__init__()
        spec = spec or EnvSpec(name=self.NAME)
        if spec.name != self.NAME:
            raise SpecError(f"spec for {spec.name!r} given to {self.NAME!r}")
        problems = spec.problems(self.FLAGS)
        if problems:
            raise SpecError("; ".join(problems))
        self.env_spec = spec
        self.width = spec.width
        self.height = spec.height
        self.action_space = spaces.Discrete(len(self.ACTIONS))
        self.observation_space = spaces.Dict({
            "raw": spaces.Box(0.0, 1.0, self.raw_shape, dtype=np.float32),
            "objects": spaces.Box(-np.inf, np.inf, (len(self.SLOTS), len(COLUMNS)), dtype=np.float32),
        })
        self._rng = None
        self._noise_rng = None
        self._frames = collections.deque(maxlen=spec.frame_stack)
        self._objects_now = None
        self.steps = 0
        self.done = True

    @property
    def raw_shape(self):
        return (self.env_spec.frame_stack, self.width, self.height, len(self.CHANNELS))

    @property
    def modification(self):
        return self.env_spec.modification

    def _seed(self, seed):
        self._rng = np.random.default_rng(seed)
        self._noise_rng = np.random.default_rng([seed, 1])

    def reset(self, *, seed=None, options=None):
        if seed is not None:
            self._seed(seed)
        elif self._rng is None:
            self._seed(self.env_spec.seed)
        self.steps = 0
        self.done = False
        self._reset_world()
        self._frames.clear()
        frame = self._render()
        for _ in range(self.env_spec.frame_stack):
            self._frames.append(frame)
        self._objects_now = self._noisy_objects()
        return self._observation(), {}

    def step(self, action):
        if self.done:
            raise UsageError("step() called on a finished episode; call reset() first")
        action = int(action)
        if not self.action_space.contains(action):
            raise UsageError(f"action {action} outside {self.NAME} action set {self.ACTIONS}")
        reward, terminated = self._advance(action)
        self.steps += 1
        truncated = not terminated and self.steps >= self.env_spec.max_steps
        self.done = terminated or truncated
        self._frames.append(self._render())
        self._objects_now = self._noisy_objects()
        return self._observation(), float(reward), terminated, truncated, {}

    def _noisy_objects(self):
        objects = self._objects()
        if self.modification.noise > 0.0:
            objects = apply_objectness_noise(objects, self.modification.noise, self._noise_rng)
        return objects

    def _observation(self):
        return {
            "raw": np.stack(self._frames).astype(np.float32),
            "objects": self._objects_now.astype(np.float32),
        }

    def object_state(self):
        """Object-centric state of the current step."""
        return ObjectState(self._objects_now, self.SLOTS)

    def _empty_grid(self):
        return np.zeros((self.width, self.height, len(self.CHANNELS)), dtype=np.float32)

    def _channel(self, name):
        return self.CHANNELS.index(name)

    def get_state(self):
        """Snapshot of the full environment state, including the random generators."""
        return {
            "world": copy.deepcopy(self._world_state()),
            "rng": copy.deepcopy(self._rng.bit_generator.state) if self._rng is not None else None,
            "noise_rng": copy.deepcopy(self._noise_rng.bit_generator.state) if self._noise_rng is not None else None,
            "frames": [f.copy() for f in self._frames],
            "objects": None if self._objects_now is None else self._objects_now.copy(),
            "steps": self.steps,
            "done": self.done,
        }

    def set_state(self, state):
        if state["rng"] is not None:
            self._seed(0)
            self._rng.bit_generator.state = copy.deepcopy(state["rng"])
            self._noise_rng.bit_generator.state = copy.deepcopy(state["noise_rng"])
        self._load_world_state(copy.deepcopy(state["world"]))
        self._frames.clear()
        self._frames.extend(np.asarray(f, dtype=np.float32).copy() for f in state["frames"])
        self._objects_now = None if state["objects"] is None else np.asarray(state["objects"], dtype=np.float64).copy()
        self.steps = int(state["steps"])
        self.done = bool(state["done"])

    def _reset_world(self):
        raise NotImplementedError

    def _advance(self, action):
        raise NotImplementedError

    def _objects(self):
        raise NotImplementedError

    def _render(self):
        raise NotImplementedError

    def _world_state(self):
        raise NotImplementedError

    def _load_world_state(self, state):
        raise NotImplementedError
