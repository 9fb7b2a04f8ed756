"""
Module comprising the environment registry and the vectorized wrapper.

@date: Oct 2026
"""

__all__ = [
    "ENVIRONMENTS",
    "make_env",
    "env_class",
    "VectorEnv",
]

import concurrent.futures
import logging

import numpy as np

from ..common.errors import SpecError
from .base import EnvSpec
from .kangaroo import MiniKangaroo
from .seaquest import MiniSeaquest

logger = logging.getLogger(__name__)

ENVIRONMENTS = {
    MiniKangaroo.NAME: MiniKangaroo,
    MiniSeaquest.NAME: MiniSeaquest,
}


def env_class(name):
    if name not in ENVIRONMENTS:
        raise SpecError(f"unknown environment {name!r}, expected one of {sorted(ENVIRONMENTS)}")
    return ENVIRONMENTS[name]


def make_env(spec):
    """Instantiate the environment named by ``spec``."""
    if isinstance(spec, str):
        spec = EnvSpec(name=spec)
    return env_class(spec.name)(spec)


class VectorEnv:
    """
    N independent environments stepped together, with automatic reset.

    Environment ``i`` is seeded with ``seed + i``. Results are always
    stacked by environment index, whether or not steps run on a thread
    pool. Finished episodes are reported in ``info["episodes"]`` as
    ``(env index, return, length)``.
    """

    def __init__(self, spec, num_envs, workers=0):
        self.spec = spec
        self.envs = [make_env(spec) for _ in range(num_envs)]
        self.num_envs = num_envs
        self._pool = concurrent.futures.ThreadPoolExecutor(workers) if workers > 0 else None
        self.returns = np.zeros(num_envs)
        self.lengths = np.zeros(num_envs, dtype=np.int64)

    @property
    def single_env(self):
        return self.envs[0]

    def _map(self, fn, items):
        if self._pool is None:
            return [fn(*item) for item in items]
        return list(self._pool.map(lambda item: fn(*item), items))

    @staticmethod
    def _stack(observations):
        return {
            "raw": np.stack([o["raw"] for o in observations]),
            "objects": np.stack([o["objects"] for o in observations]),
        }

    def reset(self, seed=None):
        seed = self.spec.seed if seed is None else seed
        observations = self._map(lambda env, s: env.reset(seed=s)[0], [(env, seed + i) for i, env in enumerate(self.envs)])
        self.returns[:] = 0.0
        self.lengths[:] = 0
        return self._stack(observations)

    @staticmethod
    def _step_one(env, action):
        obs, reward, terminated, truncated, _ = env.step(action)
        done = terminated or truncated
        if done:
            obs, _ = env.reset()
        return obs, reward, terminated, done

    def step(self, actions):
        """Step every env; returns stacked observations, rewards, done flags and info."""
        results = self._map(self._step_one, list(zip(self.envs, [int(a) for a in actions])))
        rewards = np.array([r[1] for r in results])
        dones = np.array([r[3] for r in results])
        self.returns += rewards
        self.lengths += 1
        episodes = []
        for i in np.flatnonzero(dones):
            episodes.append((int(i), float(self.returns[i]), int(self.lengths[i])))
            self.returns[i] = 0.0
            self.lengths[i] = 0
        return self._stack([r[0] for r in results]), rewards, dones, {"episodes": episodes}

    def get_state(self):
        return {
            "envs": [env.get_state() for env in self.envs],
            "returns": self.returns.copy(),
            "lengths": self.lengths.copy(),
        }

    def set_state(self, state):
        for env, env_state in zip(self.envs, state["envs"]):
            env.set_state(env_state)
        self.returns = np.asarray(state["returns"], dtype=np.float64).copy()
        self.lengths = np.asarray(state["lengths"], dtype=np.int64).copy()

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
