"""
Module comprising MiniSeaquest, an underwater rescue grid world.

@date: Oct 2026
"""

__all__ = [
    "MiniSeaquest",
]

import logging

import numpy as np

from ..valuation.state import COLUMNS
from ..valuation.state import OBJECTNESS
from ..valuation.state import ORIENTATION
from ..valuation.state import VALUE
from ..valuation.state import X
from ..valuation.state import Y
from .base import GridEnv

logger = logging.getLogger(__name__)

NOOP, LEFT, RIGHT, UP, DOWN, FIRE = range(6)

OXYGEN_MAX = 100
CAPACITY = 4

REWARD_DIVER = 5.0
REWARD_SURFACE_PER_DIVER = 20.0
REWARD_EMPTY_SURFACE = -5.0
REWARD_SHARK = 2.0
REWARD_DEATH = -10.0

DIVER_PERIOD = 2
SHARK_RESPAWN = 10


class MiniSeaquest(GridEnv):
    """
    MiniSeaquest.

    Row 0 is the surface. Oxygen drops by one per step underwater and is
    refilled at the surface, where carried divers are cashed in. Divers and
    sharks swim horizontally and re-enter from the opposite side on a new
    row. The player row's ``value`` is the number of divers carried; the
    ``oxygen`` row's ``value`` is the oxygen level. Contact with a shark or
    diver is checked after the player moves and again after they swim, so
    swapping cells counts.

    Flags: ``no_enemies``.
    """

    NAME = "mini-seaquest"
    ACTIONS = ("noop", "left", "right", "up", "down", "fire")
    SLOTS = ("player", "oxygen", "diver1", "diver2", "shark1", "shark2", "shark3")
    CHANNELS = ("player", "diver", "enemy", "oxygen", "surface")
    FLAGS = frozenset({"no_enemies"})
    VALUATION_OVERRIDES = {
        "full_divers": {"threshold": CAPACITY - 0.5},
        "not_full": {"threshold": CAPACITY - 0.5},
    }

    def _random_row(self, low=2):
        return int(self._rng.integers(low, self.height))

    def _spawn(self, direction):
        x = 0 if direction > 0 else self.width - 1
        return [x, self._random_row(), direction]

    def _reset_world(self):
        self.player = [self.width // 2, 0]
        self.orientation = 1
        self.oxygen = OXYGEN_MAX
        self.divers_carried = 0
        # diver: [x, y, direction]
        self.divers = [self._spawn(1), self._spawn(-1)]
        # shark: [x, y, direction, alive, respawn timer]
        enemies = int("no_enemies" not in self.modification)
        self.sharks = [self._spawn(d) + [enemies, 0] for d in (1, -1, 1)]

    def _advance(self, action):
        reward = 0.0
        x, y = self.player
        was_underwater = y > 0

        if action == LEFT:
            self.player[0] = max(0, x - 1)
            self.orientation = -1
        elif action == RIGHT:
            self.player[0] = min(self.width - 1, x + 1)
            self.orientation = 1
        elif action == UP:
            self.player[1] = max(0, y - 1)
        elif action == DOWN:
            self.player[1] = min(self.height - 1, y + 1)
        elif action == FIRE and y > 0:
            targets = [s for s in self.sharks if s[3] and s[1] == y]
            if targets:
                nearest = min(targets, key=lambda s: (abs(s[0] - x), s[0]))
                nearest[3] = 0
                nearest[4] = SHARK_RESPAWN
                reward += REWARD_SHARK

        if self.player[1] == 0:
            if was_underwater:
                if self.divers_carried:
                    reward += REWARD_SURFACE_PER_DIVER * self.divers_carried
                else:
                    reward += REWARD_EMPTY_SURFACE
                self.divers_carried = 0
            self.oxygen = OXYGEN_MAX
        else:
            self.oxygen = max(0, self.oxygen - 1)

        reward += self._collect()
        if self._hit():
            return REWARD_DEATH, True
        self._move_divers()
        reward += self._collect()
        self._move_sharks()
        if self._hit() or self.oxygen == 0:
            return REWARD_DEATH, True
        return reward, False

    def _move_divers(self):
        if self.steps % DIVER_PERIOD:
            return
        for i, diver in enumerate(self.divers):
            diver[0] += diver[2]
            if not 0 <= diver[0] < self.width:
                self.divers[i] = self._spawn(diver[2])

    def _collect(self):
        reward = 0.0
        for i, diver in enumerate(self.divers):
            if diver[:2] == self.player and self.divers_carried < CAPACITY:
                self.divers_carried += 1
                reward += REWARD_DIVER
                self.divers[i] = self._spawn(diver[2])
        return reward

    def _move_sharks(self):
        for i, shark in enumerate(self.sharks):
            if not shark[3]:
                if shark[4] > 0:
                    shark[4] -= 1
                    if shark[4] == 0:
                        self.sharks[i] = self._spawn(shark[2]) + [1, 0]
                continue
            shark[0] += shark[2]
            if not 0 <= shark[0] < self.width:
                self.sharks[i] = self._spawn(shark[2]) + [1, 0]

    def _hit(self):
        return any(s[3] and s[:2] == self.player for s in self.sharks)

    def _objects(self):
        z = np.zeros((len(self.SLOTS), len(COLUMNS)))
        z[0, [OBJECTNESS, X, Y, ORIENTATION, VALUE]] = [1.0, *self.player, self.orientation, self.divers_carried]
        z[1, [OBJECTNESS, VALUE]] = [1.0, self.oxygen]
        for row, diver in zip((2, 3), self.divers):
            z[row, [OBJECTNESS, X, Y, ORIENTATION]] = [1.0, diver[0], diver[1], diver[2]]
        for row, shark in zip((4, 5, 6), self.sharks):
            if shark[3]:
                z[row, [OBJECTNESS, X, Y, ORIENTATION]] = [1.0, shark[0], shark[1], shark[2]]
        return z

    def _render(self):
        grid = self._empty_grid()
        grid[:, 0, self._channel("surface")] = 1.0
        bar = max(1, int(np.ceil(self.oxygen / OXYGEN_MAX * self.width)))
        grid[:bar, 0, self._channel("oxygen")] = 1.0
        for diver in self.divers:
            grid[diver[0], diver[1], self._channel("diver")] = 1.0
        for shark in self.sharks:
            if shark[3]:
                grid[shark[0], shark[1], self._channel("enemy")] = 1.0
        grid[self.player[0], self.player[1], self._channel("player")] = 1.0
        return grid

    def _world_state(self):
        return {
            "player": self.player,
            "orientation": self.orientation,
            "oxygen": self.oxygen,
            "divers_carried": self.divers_carried,
            "divers": self.divers,
            "sharks": self.sharks,
        }

    def _load_world_state(self, state):
        self.player = list(map(int, state["player"]))
        self.orientation = int(state["orientation"])
        self.oxygen = int(state["oxygen"])
        self.divers_carried = int(state["divers_carried"])
        self.divers = [list(map(int, d)) for d in state["divers"]]
        self.sharks = [list(map(int, s)) for s in state["sharks"]]
