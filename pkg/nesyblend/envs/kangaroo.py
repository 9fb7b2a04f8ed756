"""
Module comprising MiniKangaroo, a three-floor climbing grid world.

The player starts on the bottom floor and must reach the joey at the top of
the upper ladder. Monkeys walk towards the player on their floor and can be
punched; coconuts fall down fixed columns.

@date: Oct 2026
"""

__all__ = [
    "MiniKangaroo",
]

import logging

import numpy as np

from ..valuation.state import COLUMNS
from ..valuation.state import OBJECTNESS
from ..valuation.state import ORIENTATION
from ..valuation.state import X
from ..valuation.state import Y
from .base import GridEnv

logger = logging.getLogger(__name__)

NOOP, LEFT, RIGHT, UP, DOWN, PUNCH = range(6)

REWARD_PUNCH = 5.0
REWARD_DEATH = -10.0
REWARD_JOEY = 100.0

MONKEY_PERIOD = 2
MONKEY_RESPAWN = 24
COCONUT_PERIOD = 16
COCONUT_COLUMNS = (4, 9, 13, 6, 11)


class MiniKangaroo(GridEnv):
    """
    MiniKangaroo.

    Floors are the rows ``H-2``, ``H-6`` and ``H-10``. ``ladder1`` joins the
    bottom and middle floors, ``ladder2`` the middle and top floors; climbing
    takes one ``up`` at the foot of a ladder.

    Flags: ``no_enemies``, ``relocated_ladders``, ``random_position``,
    ``disable_falling_coconut``.
    """

    NAME = "mini-kangaroo"
    ACTIONS = ("noop", "left", "right", "up", "down", "punch")
    SLOTS = ("player", "joey", "ladder1", "ladder2", "monkey1", "monkey2", "coconut1")
    CHANNELS = ("floor", "ladder", "player", "enemy", "coconut", "joey")
    FLAGS = frozenset({"no_enemies", "relocated_ladders", "random_position", "disable_falling_coconut"})
    VALUATION_OVERRIDES = {}

    @property
    def floors(self):
        """Floor rows, bottom first."""
        return (self.height - 2, self.height - 6, self.height - 10)

    def _ladder_columns(self):
        columns = (self.width - 3, 2)
        if "relocated_ladders" in self.modification:
            columns = tuple(self.width - 1 - c for c in columns)
        return columns

    def _reset_world(self):
        bottom, middle, top = self.floors
        c1, c2 = self._ladder_columns()
        # ladder: (column, lower floor row, upper floor row)
        self.ladders = [[c1, bottom, middle], [c2, middle, top]]
        self.joey = [c2, top]

        start_x = 1
        if "random_position" in self.modification:
            start_x = int(self._rng.integers(0, self.width // 2))
        self.player = [start_x, bottom]
        self.orientation = 1

        enemies = "no_enemies" not in self.modification
        # monkey: [x, y, alive, respawn timer, spawn x]
        self.monkeys = [
            [self.width - 1, bottom, int(enemies), 0, self.width - 1],
            [0, middle, int(enemies), 0, 0],
        ]
        self.coconuts_enabled = enemies and "disable_falling_coconut" not in self.modification
        # coconut: [x, y, falling]
        self.coconut = [0, 0, 0]
        self.coconut_index = 0

    def _ladder_at(self, x, y, foot=True):
        for column, lower, upper in self.ladders:
            if x == column and y == (lower if foot else upper):
                return lower, upper
        return None

    def _advance(self, action):
        reward = 0.0
        x, y = self.player

        if action == LEFT:
            self.player[0] = max(0, x - 1)
            self.orientation = -1
        elif action == RIGHT:
            self.player[0] = min(self.width - 1, x + 1)
            self.orientation = 1
        elif action == UP:
            ladder = self._ladder_at(x, y, foot=True)
            if ladder is not None:
                self.player[1] = ladder[1]
        elif action == DOWN:
            ladder = self._ladder_at(x, y, foot=False)
            if ladder is not None:
                self.player[1] = ladder[0]
        elif action == PUNCH:
            for monkey in self.monkeys:
                if monkey[2] and monkey[1] == y and abs(monkey[0] - x) <= 1:
                    monkey[2] = 0
                    monkey[3] = MONKEY_RESPAWN
                    reward += REWARD_PUNCH
                    break

        if self.player == self.joey:
            return REWARD_JOEY, True

        self._move_monkeys()
        self._move_coconut()
        if self._hit():
            return REWARD_DEATH, True
        return reward, False

    def _move_monkeys(self):
        for monkey in self.monkeys:
            if not monkey[2]:
                if monkey[3] > 0 and "no_enemies" not in self.modification:
                    monkey[3] -= 1
                    if monkey[3] == 0:
                        monkey[0] = monkey[4]
                        monkey[2] = 1
                continue
            if monkey[1] == self.player[1] and self.steps % MONKEY_PERIOD == 0:
                monkey[0] += int(np.sign(self.player[0] - monkey[0]))

    def _move_coconut(self):
        if not self.coconuts_enabled:
            return
        if self.coconut[2]:
            self.coconut[1] += 1
            if self.coconut[1] >= self.height:
                self.coconut = [0, 0, 0]
        elif self.steps % COCONUT_PERIOD == 0:
            column = COCONUT_COLUMNS[self.coconut_index % len(COCONUT_COLUMNS)]
            self.coconut = [min(column, self.width - 1), 0, 1]
            self.coconut_index += 1

    def _hit(self):
        for monkey in self.monkeys:
            if monkey[2] and monkey[:2] == self.player:
                return True
        return bool(self.coconut[2]) and self.coconut[:2] == self.player

    def _objects(self):
        z = np.zeros((len(self.SLOTS), len(COLUMNS)))
        z[0, [OBJECTNESS, X, Y, ORIENTATION]] = [1.0, *self.player, self.orientation]
        z[1, [OBJECTNESS, X, Y]] = [1.0, *self.joey]
        for row, (column, lower, _) in zip((2, 3), self.ladders):
            z[row, [OBJECTNESS, X, Y]] = [1.0, column, lower]
        for row, monkey in zip((4, 5), self.monkeys):
            if monkey[2]:
                z[row, [OBJECTNESS, X, Y]] = [1.0, monkey[0], monkey[1]]
                z[row, ORIENTATION] = np.sign(self.player[0] - monkey[0])
        if self.coconut[2]:
            z[6, [OBJECTNESS, X, Y]] = [1.0, self.coconut[0], self.coconut[1]]
        return z

    def _render(self):
        grid = self._empty_grid()
        for row in self.floors:
            grid[:, row, self._channel("floor")] = 1.0
        for column, lower, upper in self.ladders:
            grid[column, upper:lower + 1, self._channel("ladder")] = 1.0
        grid[self.joey[0], self.joey[1], self._channel("joey")] = 1.0
        for monkey in self.monkeys:
            if monkey[2]:
                grid[monkey[0], monkey[1], self._channel("enemy")] = 1.0
        if self.coconut[2]:
            grid[self.coconut[0], self.coconut[1], self._channel("coconut")] = 1.0
        grid[self.player[0], self.player[1], self._channel("player")] = 1.0
        return grid

    def _world_state(self):
        return {
            "ladders": self.ladders,
            "joey": self.joey,
            "player": self.player,
            "orientation": self.orientation,
            "monkeys": self.monkeys,
            "coconuts_enabled": self.coconuts_enabled,
            "coconut": self.coconut,
            "coconut_index": self.coconut_index,
        }

    def _load_world_state(self, state):
        self.ladders = [list(map(int, ladder)) for ladder in state["ladders"]]
        self.joey = list(map(int, state["joey"]))
        self.player = list(map(int, state["player"]))
        self.orientation = int(state["orientation"])
        self.monkeys = [list(map(int, m)) for m in state["monkeys"]]
        self.coconuts_enabled = bool(state["coconuts_enabled"])
        self.coconut = list(map(int, state["coconut"]))
        self.coconut_index = int(state["coconut_index"])
