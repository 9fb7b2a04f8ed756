"""
Module comprising the train, eval, explain and inspect-rules commands.

@date: Oct 2026
"""

__all__ = [
    "checkpoint_state",
    "restore",
    "cmd_train",
    "evaluate_agent",
    "cmd_eval",
    "cmd_explain",
    "cmd_inspect_rules",
]

import json
import logging
import pathlib

import numpy as np
import pandas as pd
import torch
from tqdm.auto import tqdm

from ..common.errors import CheckpointError
from ..common.errors import ConfigurationError
from ..common.logs import JsonLinesWriter
from ..common.resources import read_text
from ..envs.vector import VectorEnv
from ..envs.vector import env_class
from ..envs.vector import make_env
from ..explain.report import explain_state
from ..explain.report import write_explanation
from ..logic.parser import format_rules
from ..logic.parser import parse_language
from ..logic.parser import parse_rules
from ..policy.agent import sample_action
from ..reasoning.graph import build_graph
from ..reasoning.graph import dump_graph
from ..reasoning.grounding import ground_program
from ..reasoning.inference import default_steps
from ..training.trainer import Trainer
from .checkpoint import save_checkpoint
from .config import RunConfig
from .config import build_agent
from .config import resolve_run

logger = logging.getLogger(__name__)


def checkpoint_state(setup, trainer):
    """Checkpoint contents of a training run."""
    return {
        "config": setup.config.to_dict(),
        "language_text": setup.language_text,
        "rules_text": setup.rules_text,
        "digests": setup.digests,
        "learned_rules": format_rules(trainer.agent.logic.to_ruleset()),
        "global_step": trainer.global_step,
        "iteration": trainer.iteration,
        "trainer": trainer.state_dict(),
    }


def restore(state, overrides=None):
    """Setup and agent of a loaded checkpoint, with optional config overrides."""
    try:
        cfg = RunConfig.from_dict(state["config"])
        if overrides:
            cfg = cfg.with_overrides(overrides)
        setup = resolve_run(cfg, state["language_text"], state["rules_text"])
        if setup.digests != state["digests"]:
            raise CheckpointError("rule sources do not match their stored digests")
        agent = build_agent(setup)
        agent.load_state_dict(state["trainer"]["agent"])
    except KeyError as e:
        raise CheckpointError(f"checkpoint lacks field {e}") from e
    except RuntimeError as e:
        raise CheckpointError(f"checkpoint parameters do not fit the agent: {e}") from e
    return setup, agent


def _truncate_metrics(path, iteration):
    if not path.exists():
        return
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f if line.strip() and json.loads(line)["iteration"] <= iteration]
    with open(path, "w", encoding="utf-8") as f:
        f.writelines(lines)


def cmd_train(cfg, resume=None, progress=True):
    """
    Train an agent and return its run directory.

    ``runs/<name>/`` receives ``config.json``, ``metrics.jsonl`` and the
    ``ckpt_<step>.bin`` checkpoints. With ``resume`` (a loaded checkpoint
    state), training continues where the checkpoint left off.
    """
    if resume is not None:
        setup = resolve_run(cfg, resume["language_text"], resume["rules_text"])
    else:
        setup = resolve_run(cfg)
    run_dir = cfg.run_dir
    metrics_path = run_dir / "metrics.jsonl"
    if resume is None and metrics_path.exists():
        raise ConfigurationError(f"run directory {run_dir} already holds a run; pick another --name or --resume")

    run_dir.mkdir(parents=True, exist_ok=True)
    with open(run_dir / "config.json", "w", encoding="utf-8") as f:
        f.write(cfg.to_json() + "\n")
    logger.info("run directory %s", run_dir)

    agent = build_agent(setup)
    envs = VectorEnv(cfg.env, cfg.train.num_envs, cfg.train.env_workers)

    def on_checkpoint(trainer):
        save_checkpoint(run_dir / f"ckpt_{trainer.global_step}.bin", checkpoint_state(setup, trainer))

    trainer = Trainer(agent, envs, cfg.train, metrics=None, on_checkpoint=on_checkpoint)
    if resume is not None:
        trainer.load_state_dict(resume["trainer"])
        _truncate_metrics(metrics_path, trainer.iteration)
        logger.info("resumed at iteration %d, step %d", trainer.iteration, trainer.global_step)
    trainer.metrics = JsonLinesWriter(metrics_path)
    try:
        trainer.train(progress=progress)
    finally:
        envs.close()
    return run_dir


def evaluate_agent(agent, spec, episodes=10, seed=0):
    """
    Roll ``episodes`` episodes with seeds ``seed, seed + 1, ...``.

    Actions are sampled from the blended policy with a generator seeded like
    the episode. With ``agent=None`` they are drawn uniformly from the action
    set instead, which gives the random-policy baseline.
    """
    env = make_env(spec)
    returns, lengths, betas = [], [], []
    if agent is not None:
        agent.eval()
    for episode in range(episodes):
        generator = torch.Generator()
        generator.manual_seed(seed + episode)
        obs, _ = env.reset(seed=seed + episode)
        total, done = 0.0, False
        while not done:
            if agent is None:
                action = torch.randint(len(env.ACTIONS), (), generator=generator)
            else:
                with torch.no_grad():
                    output = agent(torch.as_tensor(obs["objects"]), torch.as_tensor(obs["raw"]))
                action, _ = sample_action(output, generator=generator)
                betas.append(float(output.beta))
            obs, reward, terminated, truncated, _ = env.step(int(action))
            total += reward
            done = terminated or truncated
        returns.append(total)
        lengths.append(env.steps)
    betas = np.asarray(betas)
    return {
        "episodes": episodes,
        "mean_return": float(np.mean(returns)),
        "std_return": float(np.std(returns)),
        "mean_length": float(np.mean(lengths)),
        "std_length": float(np.std(lengths)),
        "beta_mean": float(betas.mean()) if betas.size else float("nan"),
        "logic_usage_frac": float((betas < 0.5).mean()) if betas.size else float("nan"),
    }


def cmd_eval(state, settings, noises=(0.0, ), episodes=10, seed=0, out=None, env=None):
    """
    Evaluate a checkpoint over every (modification, noise) setting.

    ``state=None`` evaluates the uniform random policy on ``env`` instead;
    its table goes to ``<runs>/random-<env>/reports/eval.csv`` by default.
    Returns the summary table, one row per setting, also written to ``out``
    (``reports/eval.csv`` in the run directory by default).
    """
    if state is None:
        env_cls = env_class(env)
        cfg = RunConfig().with_overrides({"name": f"random-{env}", "env.name": env})
        agent = None
    else:
        setup, agent = restore(state)
        cfg = setup.config
        env_cls = setup.env_cls
        if tuple(agent.logic.action_names) != env_cls.ACTIONS:
            raise ConfigurationError(f"checkpoint actions {agent.logic.action_names} do not match {cfg.env.name}")

    specs = []
    problems = []
    for flags in settings:
        for noise in noises:
            spec = cfg.env.with_modification(flags, noise)
            problems += spec.problems(env_cls.FLAGS)
            specs.append(spec)
    if problems:
        raise ConfigurationError("invalid evaluation settings", sorted(set(problems)))

    rows = []
    for spec in tqdm(specs, desc="eval", unit="setting"):
        row = {
            "policy": "random" if agent is None else "checkpoint",
            "env": spec.name,
            "mods": ",".join(spec.modification.flags),
            "noise": spec.modification.noise,
        }
        row.update(evaluate_agent(agent, spec, episodes, seed))
        logger.info("eval %s", row)
        rows.append(row)
    summary = pd.DataFrame(rows)

    out = pathlib.Path(out) if out else cfg.run_dir / "reports" / "eval.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    summary.to_csv(out, index=False)
    return summary


def cmd_explain(state, steps=100, seed=0, k=3, out=None, ig_steps=64, logic_target="value"):
    """
    Roll the policy for ``steps`` steps, explaining every decision.

    Writes ``step_XXXX/`` report directories and ``timeline.csv`` with one
    row per step; returns the output directory.
    """
    setup, agent = restore(state)
    cfg = setup.config
    out = pathlib.Path(out) if out else cfg.run_dir / "reports" / f"explain_{state['global_step']}"
    env = make_env(cfg.env)
    generator = torch.Generator()
    generator.manual_seed(seed)
    obs, _ = env.reset(seed=seed)
    agent.eval()

    rows = []
    for step in tqdm(range(steps), desc="explain", unit="step"):
        z = torch.as_tensor(obs["objects"])
        x = torch.as_tensor(obs["raw"])
        with torch.no_grad():
            output = agent(z, x)
        action, _ = sample_action(output, generator=generator)
        explanation = explain_state(z, x, agent, k=k, action=int(action), channel_names=env.CHANNELS,
                                    ig_steps=ig_steps, logic_target=logic_target)
        write_explanation(explanation, out / f"step_{step:04d}")

        obs, reward, terminated, truncated, _ = env.step(int(action))
        rows.append({
            "step": step,
            "beta": explanation.beta,
            "max_logic_prob": float(explanation.logic_dist.max()),
            "max_neural_prob": float(explanation.neural_dist.max()),
            "action": explanation.action_name,
            "module": "neural" if explanation.beta > 0.5 else "logic",
            "reward": reward,
        })
        if terminated or truncated:
            obs, _ = env.reset()

    pd.DataFrame(rows).to_csv(out / "timeline.csv", index=False)
    return out


def cmd_inspect_rules(language_path, rules_path, dump=None):
    """Parse and ground a rule file; returns a text summary."""
    for path in (language_path, rules_path):
        if not pathlib.Path(path).is_file():
            raise ConfigurationError(f"file not found: {path}")
    lang = parse_language(read_text(language_path))
    rules = parse_rules(read_text(rules_path), lang)
    gp = ground_program(rules)
    graph = build_graph(gp)

    lines = [
        f"language: {len(lang.types)} types, {len(lang.constants)} constants, "
        f"{len(lang.predicates)} predicates "
        f"({len(lang.action_predicates)} action, {len(lang.state_predicates)} state, "
        f"{len(lang.blend_predicates)} blend)",
        f"rules: {len(rules)} ({len(rules.action_rule_indices)} action, {len(rules.blend_rule_indices)} blend)",
        f"ground atoms: {gp.num_atoms}",
        f"ground rules: {len(gp.ground_rules)}",
        f"graph: {graph.num_nodes} nodes, {graph.num_edges} edges",
        f"default inference steps: {default_steps(rules)}",
        "",
    ]
    lines.append(format_rules(rules).rstrip("\n"))
    if dump is not None:
        dump = pathlib.Path(dump)
        dump.parent.mkdir(parents=True, exist_ok=True)
        with open(dump, "w", encoding="utf-8") as f:
            f.write(dump_graph(graph, gp))
        lines.append(f"graph dump written to {dump}")
    return "\n".join(lines) + "\n"
