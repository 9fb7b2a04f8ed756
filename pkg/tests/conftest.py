import pytest
import torch

from nesyblend.cli.config import RunConfig
from nesyblend.cli.config import build_agent
from nesyblend.cli.config import resolve_run
from nesyblend.logic.parser import parse_language
from nesyblend.logic.parser import parse_rules
from nesyblend.reasoning.graph import build_graph
from nesyblend.reasoning.grounding import ground_program
from nesyblend.training.config import TrainConfig

LADDER_LANGUAGE = """
type image.
type player.
type ladder.
const img:image.
const player:player.
const ladder1:ladder.
pred up/1 action (image).
pred right/1 action (image).
pred left/1 action (image).
pred on_ladder/2 state (player,ladder).
pred same_floor/2 state (player,ladder).
pred left_of/2 state (player,ladder).
pred right_of/2 state (player,ladder).
"""

LADDER_RULES = """
0.73 up(X):-on_ladder(Player,Ladder),same_floor(Player,Ladder).
0.50 right(X):-left_of(Player,Ladder),same_floor(Player,Ladder).
0.50 left(X):-right_of(Player,Ladder),same_floor(Player,Ladder).
"""

TINY_TRAIN = TrainConfig(
    num_envs=2,
    num_steps=16,
    total_timesteps=64,
    update_epochs=1,
    num_minibatches=2,
)


@pytest.fixture
def ladder_lang():
    return parse_language(LADDER_LANGUAGE)


@pytest.fixture
def ladder_rules(ladder_lang):
    return parse_rules(LADDER_RULES, ladder_lang)


@pytest.fixture
def ladder_program(ladder_rules):
    return ground_program(ladder_rules)


@pytest.fixture
def ladder_graph(ladder_program):
    return build_graph(ladder_program)


@pytest.fixture
def ladder_state(ladder_program):
    """Input atoms with same_floor=0.9, on_ladder=0.3, left_of=0.8, right_of=0."""
    gp = ladder_program
    x0 = torch.zeros(gp.num_atoms, dtype=torch.float64)
    args = ("player", "ladder1")
    x0[gp.atom_index("same_floor", args)] = 0.9
    x0[gp.atom_index("on_ladder", args)] = 0.3
    x0[gp.atom_index("left_of", args)] = 0.8
    return x0


@pytest.fixture
def kangaroo_setup():
    return resolve_run(RunConfig())


@pytest.fixture
def kangaroo_agent(kangaroo_setup):
    return build_agent(kangaroo_setup, seed=0)


@pytest.fixture
def seaquest_setup():
    return resolve_run(RunConfig().with_overrides({"env.name": "mini-seaquest"}))


@pytest.fixture
def tiny_config(tmp_path):
    return RunConfig(name="tiny", runs_dir=str(tmp_path / "runs"), train=TINY_TRAIN)
