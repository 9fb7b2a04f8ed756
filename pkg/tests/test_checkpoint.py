import numpy as np
import pytest
import torch

from nesyblend.cli.checkpoint import FORMAT_VERSION
from nesyblend.cli.checkpoint import MAGIC
from nesyblend.cli.checkpoint import decode_checkpoint
from nesyblend.cli.checkpoint import encode_checkpoint
from nesyblend.cli.checkpoint import load_checkpoint
from nesyblend.cli.checkpoint import save_checkpoint
from nesyblend.cli.commands import checkpoint_state
from nesyblend.cli.commands import restore
from nesyblend.cli.config import build_agent
from nesyblend.common.errors import CheckpointError
from nesyblend.envs.vector import VectorEnv
from nesyblend.training.trainer import Trainer

from .conftest import TINY_TRAIN


@pytest.fixture
def trained_state(kangaroo_setup):
    agent = build_agent(kangaroo_setup, seed=0)
    trainer = Trainer(agent, VectorEnv(kangaroo_setup.config.env, TINY_TRAIN.num_envs), TINY_TRAIN)
    trainer.train_iteration()
    return checkpoint_state(kangaroo_setup, trainer)


class TestFormat:
    def test_scalars_and_arrays(self):
        state = {
            "b": [1, 2.5, None, True, "x"],
            "a": (np.arange(6, dtype=np.int16).reshape(2, 3), torch.tensor([0.1, 0.2])),
            "ids": {3: "three", 1: "one"},
        }
        decoded = decode_checkpoint(encode_checkpoint(state))
        assert decoded["b"] == [1, 2.5, None, True, "x"]
        array, tensor = decoded["a"]
        assert array.dtype == np.int16 and np.array_equal(array, state["a"][0])
        assert torch.equal(tensor, state["a"][1])
        assert decoded["ids"] == {3: "three", 1: "one"}

    def test_header(self):
        data = encode_checkpoint({"x": 1})
        assert data[:len(MAGIC)] == MAGIC
        assert data[len(MAGIC)] == FORMAT_VERSION

    def test_bad_magic(self):
        with pytest.raises(CheckpointError, match="magic"):
            decode_checkpoint(b"PK\x03\x04" + bytes(20))

    def test_other_version(self):
        data = bytearray(encode_checkpoint({"x": 1}))
        data[len(MAGIC)] = FORMAT_VERSION + 1
        with pytest.raises(CheckpointError, match="version"):
            decode_checkpoint(bytes(data))

    def test_truncated(self):
        data = encode_checkpoint({"w": np.zeros(100)})
        with pytest.raises(CheckpointError):
            decode_checkpoint(data[:-10])
        with pytest.raises(CheckpointError):
            decode_checkpoint(data[:len(MAGIC) + 3])

    def test_trailing_bytes(self):
        with pytest.raises(CheckpointError, match="trailing"):
            decode_checkpoint(encode_checkpoint({"x": 1}) + b"\x00")

    def test_unsupported_value(self):
        with pytest.raises(CheckpointError):
            encode_checkpoint({"x": object()})


class TestTrainingCheckpoint:
    def test_byte_identical_resave(self, trained_state, tmp_path):
        first = save_checkpoint(tmp_path / "a.bin", trained_state)
        second = save_checkpoint(tmp_path / "b.bin", load_checkpoint(first))
        assert first.read_bytes() == second.read_bytes()

    def test_round_trip(self, trained_state, tmp_path):
        loaded = load_checkpoint(save_checkpoint(tmp_path / "ckpt.bin", trained_state))
        assert loaded["global_step"] == trained_state["global_step"] == TINY_TRAIN.batch_size
        assert loaded["learned_rules"] == trained_state["learned_rules"]
        for key, value in trained_state["trainer"]["agent"].items():
            assert torch.equal(loaded["trainer"]["agent"][key], value)

    def test_restore(self, trained_state, tmp_path):
        loaded = load_checkpoint(save_checkpoint(tmp_path / "ckpt.bin", trained_state))
        _, agent = restore(loaded)
        for key, value in agent.state_dict().items():
            assert torch.equal(value, trained_state["trainer"]["agent"][key])

    def test_edited_rules(self, trained_state):
        trained_state["rules_text"] += "\n"
        with pytest.raises(CheckpointError, match="digest"):
            restore(trained_state)

    def test_missing_field(self, trained_state):
        del trained_state["trainer"]
        with pytest.raises(CheckpointError, match="trainer"):
            restore(trained_state)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError, match="not found"):
            load_checkpoint(tmp_path / "nothing.bin")
