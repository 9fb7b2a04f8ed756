"""
Module comprising the PPO training loop of the blended agent.

@date: Oct 2026
"""

__all__ = [
    "Trainer",
    "train",
    "METRIC_FIELDS",
]

import logging
import math

import numpy as np
import torch
from tqdm.auto import tqdm

from ..common.errors import NesyError
from ..common.errors import TrainingError
from ..common.logs import dumps_record
from ..policy.agent import sample_action
from .buffer import RolloutBuffer
from .ppo import apply_update
from .ppo import blend_entropy
from .ppo import ppo_objective

logger = logging.getLogger(__name__)

METRIC_FIELDS = (
    "iteration",
    "global_step",
    "mean_return",
    "beta_mean",
    "beta_entropy",
    "logic_usage_frac",
    "loss_policy",
    "loss_value",
    "entropy",
    "blend_reg",
)


def _tensors(obs):
    return torch.as_tensor(obs["objects"], dtype=torch.float32), torch.as_tensor(obs["raw"], dtype=torch.float32)


class Trainer:
    """
    Rollout, advantage estimation and minibatch updates until the step budget.

    Parameters
    ----------
    agent : BlendedAgent
        Agent to train; its ``force_beta`` is overridden by the config.
    envs : VectorEnv
        ``cfg.num_envs`` environments.
    cfg : TrainConfig
        Hyperparameters.
    metrics : JsonLinesWriter, optional
        Receives one record per iteration.
    on_checkpoint : callable, optional
        Called with the trainer every ``cfg.checkpoint_every`` iterations and
        after the last one.
    """

    def __init__(self, agent, envs, cfg, metrics=None, on_checkpoint=None):
        cfg.validate()
        self.agent = agent
        self.envs = envs
        self.cfg = cfg
        self.metrics = metrics
        self.on_checkpoint = on_checkpoint
        torch.set_num_threads(cfg.torch_threads)

        agent.force_beta = cfg.force_beta
        groups = agent.parameter_groups()
        param_groups = []
        for name, params in groups.items():
            trainable = name not in cfg.frozen
            for p in params:
                p.requires_grad_(trainable)
            if trainable and params:
                param_groups.append({"params": params, "lr": cfg.learning_rates()[name], "name": name})
        self.parameters = [p for group in param_groups for p in group["params"]]
        if not self.parameters:
            raise TrainingError("every parameter group is frozen")
        self.optimizer = torch.optim.Adam(param_groups, eps=1e-5)

        self.generator = torch.Generator()
        self.generator.manual_seed(cfg.seed)
        obs = envs.reset(seed=cfg.seed)
        self.next_objects, self.next_raw = _tensors(obs)
        self.buffer = RolloutBuffer(
            cfg.num_steps,
            cfg.num_envs,
            self.next_objects.shape[1:],
            self.next_raw.shape[1:],
        )
        self.global_step = 0
        self.iteration = 0

    def collect(self):
        """Fill the rollout buffer; returns the finished episodes."""
        self.buffer.reset()
        episodes = []
        self.agent.eval()
        with torch.no_grad():
            for _ in range(self.cfg.num_steps):
                output = self.agent(self.next_objects, self.next_raw)
                actions, log_probs = sample_action(output, generator=self.generator)
                obs, rewards, dones, info = self.envs.step(actions.tolist())
                self.buffer.add(
                    self.next_objects,
                    self.next_raw,
                    actions,
                    log_probs,
                    rewards,
                    dones,
                    output.value,
                    output.beta,
                )
                episodes.extend(info["episodes"])
                self.next_objects, self.next_raw = _tensors(obs)
                self.global_step += self.cfg.num_envs
            last_value = self.agent(self.next_objects, self.next_raw).value
        return episodes, last_value

    def update(self, last_value):
        """update_epochs passes of shuffled minibatch updates; returns mean statistics."""
        advantages, returns = self.buffer.advantages(last_value, self.cfg.gamma, self.cfg.gae_lambda)
        batch = self.buffer.flatten(advantages, returns)
        self.agent.train()
        totals = {}
        count = 0
        for _ in range(self.cfg.update_epochs):
            order = torch.randperm(self.cfg.batch_size, generator=self.generator)
            for start in range(0, self.cfg.batch_size, self.cfg.minibatch_size):
                idx = order[start:start + self.cfg.minibatch_size]
                minibatch = {k: v[idx] for k, v in batch.items()}
                loss, stats = ppo_objective(self.agent, minibatch, self.cfg)
                stats["grad_norm"] = apply_update(loss, self.optimizer, self.parameters, self.cfg.max_grad_norm)
                for key, value in stats.items():
                    totals[key] = totals.get(key, 0.0) + value
                count += 1
        return {k: v / count for k, v in totals.items()}

    def train_iteration(self):
        """One rollout and update; returns the metrics record."""
        episodes, last_value = self.collect()
        stats = self.update(last_value)
        self.iteration += 1

        betas = self.buffer.betas.reshape(-1)
        returns = [ret for _, ret, _ in episodes]
        record = {
            "iteration": self.iteration,
            "global_step": self.global_step,
            "mean_return": float(np.mean(returns)) if returns else math.nan,
            "beta_mean": float(betas.mean()),
            "beta_entropy": float(blend_entropy(betas.clamp(0.0, 1.0).double()).mean()),
            "logic_usage_frac": float((betas < 0.5).float().mean()),
            "loss_policy": stats["loss_policy"],
            "loss_value": stats["loss_value"],
            "entropy": stats["entropy"],
            "blend_reg": stats["blend_reg"],
        }
        logger.info(dumps_record(record))
        if self.metrics is not None:
            self.metrics.write(record)
        return record

    def train(self, progress=True):
        """Run the remaining iterations; returns their metrics records."""
        records = []
        remaining = range(self.iteration, self.cfg.num_iterations)
        for _ in tqdm(remaining, desc="train", unit="it", disable=not progress):
            try:
                records.append(self.train_iteration())
            except NesyError as e:
                raise type(e)(f"iteration {self.iteration + 1}, step {self.global_step}: {e}") from e
            if self.on_checkpoint is not None and self.cfg.checkpoint_every and \
                    self.iteration % self.cfg.checkpoint_every == 0 and self.iteration < self.cfg.num_iterations:
                self.on_checkpoint(self)
        if self.on_checkpoint is not None and records:
            self.on_checkpoint(self)
        return records

    def state_dict(self):
        """Everything needed to continue training exactly."""
        return {
            "agent": self.agent.state_dict(),
            "optimizer": self.optimizer.state_dict(),
            "generator": self.generator.get_state(),
            "envs": self.envs.get_state(),
            "next_objects": self.next_objects,
            "next_raw": self.next_raw,
            "global_step": self.global_step,
            "iteration": self.iteration,
        }

    def load_state_dict(self, state):
        self.agent.load_state_dict(state["agent"])
        self.optimizer.load_state_dict(state["optimizer"])
        self.generator.set_state(state["generator"])
        self.envs.set_state(state["envs"])
        self.next_objects = state["next_objects"].clone()
        self.next_raw = state["next_raw"].clone()
        self.global_step = int(state["global_step"])
        self.iteration = int(state["iteration"])


def train(agent, envs, cfg, metrics=None, on_checkpoint=None, progress=True):
    """Train ``agent`` on ``envs``; returns the trainer and the metrics records."""
    trainer = Trainer(agent, envs, cfg, metrics=metrics, on_checkpoint=on_checkpoint)
    return trainer, trainer.train(progress=progress)
