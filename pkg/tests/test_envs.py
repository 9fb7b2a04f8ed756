import numpy as np
import pytest

from nesyblend.common.errors import SpecError
from nesyblend.common.errors import UsageError
from nesyblend.envs.base import EnvSpec
from nesyblend.envs.base import apply_objectness_noise
from nesyblend.envs.kangaroo import MiniKangaroo
from nesyblend.envs.seaquest import MiniSeaquest
from nesyblend.envs.vector import VectorEnv
from nesyblend.envs.vector import make_env
from nesyblend.valuation.state import COLUMNS
from nesyblend.valuation.state import OBJECTNESS
from nesyblend.valuation.state import VALUE
from nesyblend.valuation.state import X
from nesyblend.valuation.state import Y

NOOP, LEFT, RIGHT, UP, DOWN, FIRE = range(6)


def _kangaroo(flags=None, **kwargs):
    return MiniKangaroo(EnvSpec(name="mini-kangaroo", **kwargs).with_modification(flags))


def _seaquest(flags=None, **kwargs):
    return MiniSeaquest(EnvSpec(name="mini-seaquest", **kwargs).with_modification(flags))


class TestMiniKangaroo:
    def test_default_layout(self):
        env = _kangaroo()
        obs, _ = env.reset(seed=0)
        z = obs["objects"]
        assert z.shape == (len(MiniKangaroo.SLOTS), len(COLUMNS))
        assert obs["raw"].shape == (4, 16, 12, len(MiniKangaroo.CHANNELS))
        assert z[0, [X, Y]].tolist() == [1.0, 10.0]
        assert z[2, [X, Y]].tolist() == [13.0, 10.0]
        assert z[3, [X, Y]].tolist() == [2.0, 6.0]
        assert z[1, [X, Y]].tolist() == [2.0, 2.0]
        assert env.observation_space.contains(obs)

    def test_relocated_ladders(self):
        env = _kangaroo("relocated_ladders")
        obs, _ = env.reset(seed=0)
        assert obs["objects"][2, X] == 2.0
        assert obs["objects"][3, X] == 13.0

    def test_random_position(self):
        starts = set()
        for seed in range(10):
            obs, _ = _kangaroo("random_position").reset(seed=seed)
            starts.add(float(obs["objects"][0, X]))
        assert len(starts) > 1

    def test_no_enemies(self):
        env = _kangaroo("no_enemies")
        obs, _ = env.reset(seed=0)
        for _ in range(20):
            obs, *_ = env.step(NOOP)
            assert obs["objects"][4:, OBJECTNESS].tolist() == [0.0, 0.0, 0.0]

    def test_reaching_the_joey(self):
        env = _kangaroo("no_enemies")
        env.reset(seed=0)
        env.player = [2, env.floors[1]]
        _, reward, terminated, truncated, _ = env.step(UP)
        assert reward == 100.0
        assert terminated and not truncated

    def test_climbing(self):
        env = _kangaroo("no_enemies")
        env.reset(seed=0)
        env.player = [13, env.floors[0]]
        obs, reward, *_ = env.step(UP)
        assert obs["objects"][0, Y] == env.floors[1]
        assert reward == 0.0

    def test_punch(self):
        env = _kangaroo("disable_falling_coconut")
        env.reset(seed=0)
        env.player = [14, env.floors[0]]
        _, reward, terminated, *_ = env.step(FIRE)
        assert reward == 5.0
        assert not terminated

    def test_invalid_flag(self):
        with pytest.raises(SpecError, match="wind"):
            _kangaroo("wind")

    def test_truncation(self):
        env = _kangaroo("no_enemies", max_steps=3)
        env.reset(seed=0)
        for _ in range(2):
            assert env.step(NOOP)[3] is False
        _, _, terminated, truncated, _ = env.step(NOOP)
        assert truncated and not terminated


class TestMiniSeaquest:
    def test_empty_surfacing(self):
        env = _seaquest("no_enemies")
        env.reset(seed=0)
        env.player = [8, 1]
        obs, reward, terminated, *_ = env.step(UP)
        assert reward == -5.0
        assert not terminated
        assert obs["objects"][1, VALUE] == 100.0

    def test_out_of_oxygen(self):
        env = _seaquest("no_enemies")
        env.reset(seed=0)
        env.player = [8, 5]
        env.oxygen = 1
        _, reward, terminated, *_ = env.step(NOOP)
        assert reward == -10.0
        assert terminated

    def test_cashing_in_divers(self):
        env = _seaquest("no_enemies")
        env.reset(seed=0)
        env.player = [8, 1]
        env.divers_carried = 2
        _, reward, *_ = env.step(UP)
        assert reward == 40.0
        assert env.divers_carried == 0

    def test_divers_below_surface(self):
        env = _seaquest()
        obs, _ = env.reset(seed=4)
        assert np.all(obs["objects"][2:, Y] >= 2.0)

    def test_only_no_enemies_flag(self):
        with pytest.raises(SpecError):
            _seaquest("relocated_ladders")

    def _underwater(self, player, divers=((0, 9, 1), (0, 10, 1)), sharks=()):
        env = _seaquest()
        env.reset(seed=0)
        env.player = list(player)
        env.divers = [list(d) for d in divers]
        dead = [[0, 11, 1, 0, 0]] * 3
        env.sharks = [list(s) for s in (list(sharks) + dead)[:3]]
        return env

    @pytest.mark.parametrize("action", [RIGHT, NOOP])
    def test_shark_contact(self, action):
        env = self._underwater([5, 4], sharks=[[6, 4, -1, 1, 0]])
        _, reward, terminated, *_ = env.step(action)
        assert reward == -10.0
        assert terminated

    def test_fire_removes_nearest_shark(self):
        env = self._underwater([8, 5], sharks=[[3, 5, 1, 1, 0], [11, 5, -1, 1, 0], [8, 7, 1, 1, 0]])
        obs, reward, terminated, *_ = env.step(FIRE)
        assert reward == 2.0
        assert not terminated
        assert [s[3] for s in env.sharks] == [1, 0, 1]
        assert obs["objects"][5, OBJECTNESS] == 0.0

    def test_fire_on_empty_row(self):
        env = self._underwater([8, 5], sharks=[[3, 7, 1, 1, 0]])
        _, reward, *_ = env.step(FIRE)
        assert reward == 0.0
        assert env.sharks[0][3] == 1

    @pytest.mark.parametrize("diver, action", [([9, 5, -1], RIGHT), ([7, 5, 1], NOOP)])
    def test_diver_pickup(self, diver, action):
        env = self._underwater([8, 5], divers=[diver, [0, 10, 1]])
        obs, reward, *_ = env.step(action)
        assert reward == 5.0
        assert env.divers_carried == 1
        assert obs["objects"][0, VALUE] == 1.0

    def test_capacity(self):
        env = self._underwater([8, 5], divers=[[7, 5, 1], [0, 10, 1]])
        env.divers_carried = 4
        _, reward, *_ = env.step(NOOP)
        assert reward == 0.0
        assert env.divers_carried == 4


class TestEpisodes:
    @pytest.mark.parametrize("name", ["mini-kangaroo", "mini-seaquest"])
    def test_step_after_done(self, name):
        env = make_env(EnvSpec(name=name, max_steps=1))
        env.reset(seed=0)
        env.step(NOOP)
        with pytest.raises(UsageError):
            env.step(NOOP)

    def test_action_out_of_range(self):
        env = make_env("mini-kangaroo")
        env.reset(seed=0)
        with pytest.raises(UsageError):
            env.step(6)

    def test_unknown_environment(self):
        with pytest.raises(SpecError):
            make_env("mini-pong")

    @pytest.mark.parametrize("name", ["mini-kangaroo", "mini-seaquest"])
    def test_deterministic(self, name):
        actions = np.random.default_rng(0).integers(0, 6, 50)
        runs = []
        for _ in range(2):
            env = make_env(name)
            obs, _ = env.reset(seed=11)
            trace = [obs["objects"]]
            for action in actions:
                obs, reward, terminated, truncated, _ = env.step(action)
                trace.append(obs["objects"])
                if terminated or truncated:
                    break
            runs.append(np.stack(trace))
        assert np.array_equal(*runs)

    def test_state_snapshot(self):
        env = make_env("mini-seaquest")
        env.reset(seed=2)
        snapshot = env.get_state()
        first = [env.step(RIGHT)[0]["raw"] for _ in range(5)]
        env.set_state(snapshot)
        second = [env.step(RIGHT)[0]["raw"] for _ in range(5)]
        assert all(np.array_equal(a, b) for a, b in zip(first, second))


SLOT_CHANNELS = {
    "mini-kangaroo": {
        "player": "player",
        "joey": "joey",
        "ladder1": "ladder",
        "ladder2": "ladder",
        "monkey1": "enemy",
        "monkey2": "enemy",
        "coconut1": "coconut",
    },
    "mini-seaquest": {
        "player": "player",
        "diver1": "diver",
        "diver2": "diver",
        "shark1": "enemy",
        "shark2": "enemy",
        "shark3": "enemy",
    },
}


def _random_rollout(spec, steps=300, seed=0):
    """Yield (env, obs, reward, terminated) along a uniformly random rollout with resets."""
    env = make_env(spec)
    rng = np.random.default_rng(seed)
    obs, _ = env.reset(seed=seed)
    yield env, obs, 0.0, False
    for _ in range(steps):
        obs, reward, terminated, truncated, _ = env.step(int(rng.integers(len(env.ACTIONS))))
        yield env, obs, reward, terminated
        if terminated or truncated:
            obs, _ = env.reset()
            yield env, obs, 0.0, False


class TestInvariants:
    @pytest.mark.parametrize("name", ["mini-kangaroo", "mini-seaquest"])
    def test_objects_match_newest_frame(self, name):
        channels = SLOT_CHANNELS[name]
        for env, obs, *_ in _random_rollout(name):
            frame = obs["raw"][-1]
            for row, slot in enumerate(env.SLOTS):
                if slot not in channels or obs["objects"][row, OBJECTNESS] != 1.0:
                    continue
                x, y = (int(v) for v in obs["objects"][row, [X, Y]])
                assert frame[x, y, env.CHANNELS.index(channels[slot])] == 1.0, (slot, x, y)

    @pytest.mark.parametrize("name", ["mini-kangaroo", "mini-seaquest"])
    def test_reward_and_length_bounds(self, name):
        spec = EnvSpec(name=name, max_steps=64)
        for env, _, reward, _ in _random_rollout(spec, steps=500, seed=1):
            assert -10.0 <= reward <= 100.0
            assert env.steps <= spec.max_steps

    @pytest.mark.parametrize("seed", range(3))
    def test_no_enemy_contact_without_enemies(self, seed):
        kangaroo = EnvSpec(name="mini-kangaroo", max_steps=64).with_modification("no_enemies")
        for _, _, reward, terminated in _random_rollout(kangaroo, steps=400, seed=seed):
            if terminated:
                assert reward == 100.0
        seaquest = EnvSpec(name="mini-seaquest", max_steps=256).with_modification("no_enemies")
        for env, obs, _, terminated in _random_rollout(seaquest, steps=400, seed=seed):
            if terminated:
                assert env.oxygen == 0
            assert not np.any(obs["objects"][4:, OBJECTNESS])


class TestObjectnessNoise:
    def test_zero_rate(self):
        z = np.ones((7, len(COLUMNS)))
        assert np.array_equal(apply_objectness_noise(z, 0.0, np.random.default_rng(0)), z)

    def test_rate_bound(self):
        with pytest.raises(SpecError):
            apply_objectness_noise(np.ones((3, len(COLUMNS))), 0.6, np.random.default_rng(0))

    def test_drop_frequency(self):
        z = np.ones((10_001, len(COLUMNS)))
        noisy = apply_objectness_noise(z, 0.1, np.random.default_rng(0))
        assert noisy[0, OBJECTNESS] == 1.0
        assert np.mean(noisy[1:, OBJECTNESS] == 0.0) == pytest.approx(0.1, abs=0.01)
        # only objectness is touched
        assert np.array_equal(noisy[:, 1:], z[:, 1:])

    def test_noisy_env(self):
        spec = EnvSpec(name="mini-kangaroo").with_modification(noise=0.5)
        env = make_env(spec)
        hidden = 0
        for seed in range(10):
            obs, _ = env.reset(seed=seed)
            assert obs["objects"][0, OBJECTNESS] == 1.0
            hidden += int(np.sum(obs["objects"][1:4, OBJECTNESS] == 0.0))
        assert hidden > 0


class TestVectorEnv:
    def test_auto_reset(self):
        envs = VectorEnv(EnvSpec(name="mini-kangaroo", max_steps=3).with_modification("no_enemies"), 2)
        obs = envs.reset(seed=0)
        assert obs["objects"].shape == (2, len(MiniKangaroo.SLOTS), len(COLUMNS))
        for _ in range(2):
            _, _, dones, info = envs.step([NOOP, NOOP])
            assert not dones.any()
            assert info["episodes"] == []
        _, rewards, dones, info = envs.step([NOOP, NOOP])
        assert dones.all()
        assert info["episodes"] == [(0, 0.0, 3), (1, 0.0, 3)]
        assert [env.steps for env in envs.envs] == [0, 0]

    def test_thread_pool_order(self):
        spec = EnvSpec(name="mini-seaquest")
        serial, pooled = VectorEnv(spec, 3), VectorEnv(spec, 3, workers=2)
        a, b = serial.reset(seed=1), pooled.reset(seed=1)
        for actions in ([1, 2, 3], [4, 0, 5], [2, 2, 2]):
            a, *_ = serial.step(actions)
            b, *_ = pooled.step(actions)
        assert np.array_equal(a["objects"], b["objects"])
        pooled.close()

    def test_state_round_trip(self):
        envs = VectorEnv(EnvSpec(name="mini-kangaroo"), 2)
        envs.reset(seed=3)
        envs.step([RIGHT, LEFT])
        state = envs.get_state()
        expected, *_ = envs.step([UP, UP])
        other = VectorEnv(EnvSpec(name="mini-kangaroo"), 2)
        other.set_state(state)
        obs, *_ = other.step([UP, UP])
        assert np.array_equal(obs["raw"], expected["raw"])
