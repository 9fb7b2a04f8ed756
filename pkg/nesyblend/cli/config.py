"""
Module comprising the run configuration and its validation.

@date: Oct 2026
"""

__all__ = [
    "RunConfig",
    "RunSetup",
    "apply_overrides",
    "parse_value",
    "resolve_path",
    "resolve_run",
    "build_agent",
    "ENV_ASSETS",
]

import copy
import dataclasses
import json
import logging
import pathlib
from typing import Dict
from typing import Optional

import torch

from ..common.errors import ConfigurationError
from ..common.errors import NesyError
from ..common.resources import ASSET_DIR
from ..common.resources import asset_path
from ..common.resources import read_text
from ..common.resources import text_digest
from ..envs.base import EnvSpec
from ..envs.base import Modification
from ..envs.vector import ENVIRONMENTS
from ..logic.parser import parse_language
from ..logic.parser import parse_rules
from ..policy.agent import BlendedAgent
from ..policy.blender import BLEND_MODES
from ..policy.logic import LogicPolicy
from ..reasoning.inference import DEFAULT_GAMMA
from ..training.config import TrainConfig
from ..valuation.registry import ValuationRegistry
from ..valuation.state import COLUMNS

logger = logging.getLogger(__name__)

ENV_ASSETS = {
    "mini-kangaroo": "kangaroo",
    "mini-seaquest": "seaquest",
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything a command needs: environment, rule files, agent and training settings."""

    name: str = "run"
    runs_dir: str = "runs"
    env: EnvSpec = EnvSpec()
    language: Optional[str] = None
    rules: Optional[str] = None
    blender: str = "logic"
    reasoning_steps: Optional[int] = None
    softor_gamma: float = DEFAULT_GAMMA
    valuation: Dict[str, object] = dataclasses.field(default_factory=dict)
    train: TrainConfig = TrainConfig()

    @property
    def run_dir(self):
        return pathlib.Path(self.runs_dir) / self.name

    def to_dict(self):
        data = dataclasses.asdict(self)
        data["env"]["modification"]["flags"] = list(self.env.modification.flags)
        data["train"]["frozen"] = list(self.train.frozen)
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data):
        """Build from nested dicts; unknown keys are reported together."""
        data = copy.deepcopy(data)
        problems = []

        def take(section_cls, values, where):
            known = {f.name for f in dataclasses.fields(section_cls)}
            unknown = sorted(set(values) - known)
            problems.extend(f"unknown config key {where}{k!r}" for k in unknown)
            return {k: v for k, v in values.items() if k in known}

        top = take(cls, data, "")
        env = take(EnvSpec, dict(top.pop("env", {})), "env.")
        modification = take(Modification, dict(env.pop("modification", {})), "env.modification.")
        train = take(TrainConfig, dict(top.pop("train", {})), "train.")
        if problems:
            raise ConfigurationError("invalid run configuration", problems)

        try:
            env_spec = EnvSpec(**env, modification=Modification.parse(
                modification.get("flags"), modification.get("noise", 0.0)))
            if "frozen" in train:
                train["frozen"] = tuple(train["frozen"])
            return cls(**top, env=env_spec, train=TrainConfig(**train))
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"invalid run configuration: {e}") from e

    def with_overrides(self, overrides):
        return RunConfig.from_dict(apply_overrides(self.to_dict(), overrides))


def parse_value(text):
    """Command-line value as JSON when possible, else the plain string."""
    try:
        return json.loads(text)
    except (TypeError, ValueError):
        return text


def apply_overrides(data, overrides):
    """
    Apply dotted-key overrides to a nested config dict.

    ``{"train.learning_rate": 1e-4, "valuation.closeby.d": 2.0}``. Keys under
    ``valuation`` may create new entries; other keys must exist.
    """
    data = copy.deepcopy(data)
    problems = []
    for key, value in overrides.items():
        parts = key.split(".")
        if parts[0] == "valuation":
            if len(parts) != 3:
                problems.append(f"valuation overrides look like valuation.<predicate>.<param>, got {key!r}")
                continue
            data.setdefault("valuation", {}).setdefault(parts[1], {})[parts[2]] = value
            continue
        node = data
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                problems.append(f"unknown config key {key!r}")
                break
            node = node[part]
        else:
            if parts[-1] not in node:
                problems.append(f"unknown config key {key!r}")
            else:
                node[parts[-1]] = value
    if problems:
        raise ConfigurationError("invalid overrides", problems)
    return data


@dataclasses.dataclass
class RunSetup:
    """Parsed and cross-checked run inputs."""

    config: RunConfig
    env_cls: type
    language_path: pathlib.Path
    rules_path: pathlib.Path
    language_text: str
    rules_text: str
    rules: object
    registry: ValuationRegistry

    @property
    def digests(self):
        return {"language": text_digest(self.language_text), "rules": text_digest(self.rules_text)}


def resolve_path(path):
    path = pathlib.Path(path)
    if path.exists() or path.is_absolute():
        return path
    packaged = ASSET_DIR.parent / path
    return packaged if packaged.exists() else path


def resolve_run(cfg, language_text=None, rules_text=None):
    """
    Validate a run configuration and load its inputs.

    Every problem is collected before a single ``ConfigurationError`` is
    raised. Rule sources can be given directly, as when restoring from a
    checkpoint.
    """
    problems = list(cfg.train.problems())
    if cfg.blender not in BLEND_MODES:
        problems.append(f"unknown blender {cfg.blender!r}, expected one of {BLEND_MODES}")
    if cfg.reasoning_steps is not None and cfg.reasoning_steps < 1:
        problems.append(f"reasoning_steps must be >= 1, got {cfg.reasoning_steps}")
    if cfg.softor_gamma <= 0:
        problems.append(f"softor_gamma must be > 0, got {cfg.softor_gamma}")

    env_cls = ENVIRONMENTS.get(cfg.env.name)
    if env_cls is None:
        problems.append(f"unknown environment {cfg.env.name!r}, expected one of {sorted(ENVIRONMENTS)}")
    else:
        problems.extend(cfg.env.problems(env_cls.FLAGS))

    stem = ENV_ASSETS.get(cfg.env.name, "kangaroo")
    rules_path = resolve_path(cfg.rules) if cfg.rules else asset_path(f"{stem}.rules")
    if cfg.language:
        language_path = resolve_path(cfg.language)
    elif cfg.rules:
        language_path = rules_path.with_suffix(".lang")
    else:
        language_path = asset_path(f"{stem}.lang")

    for label, path, text in (("language", language_path, language_text), ("rule", rules_path, rules_text)):
        if text is None and not path.is_file():
            problems.append(f"{label} file not found: {path}")

    rules = registry = None
    if not problems:
        language_text = read_text(language_path) if language_text is None else language_text
        rules_text = read_text(rules_path) if rules_text is None else rules_text
        lang = None
        try:
            lang = parse_language(language_text)
            rules = parse_rules(rules_text, lang)
        except NesyError as e:
            problems.append(f"{rules_path if lang is not None else language_path}: {e}")
            lang = None

        if lang is not None:
            actions = tuple(p.name for p in lang.action_predicates)
            if actions != env_cls.ACTIONS:
                problems.append(f"rule actions {actions} do not match {cfg.env.name} actions {env_cls.ACTIONS}")
            overrides = copy.deepcopy(env_cls.VALUATION_OVERRIDES)
            for pred, params in cfg.valuation.items():
                if isinstance(params, dict):
                    overrides.setdefault(pred, {}).update(params)
                else:
                    problems.append(f"valuation.{pred} must map parameter names to values")
            try:
                registry = ValuationRegistry.for_language(lang, overrides)
                missing = registry.missing(lang)
                if missing:
                    problems.append(f"no valuation for state predicate(s) {missing}")
            except ConfigurationError as e:
                problems.append(str(e))
            missing_slots = [c.name for c in lang.constants if c.type != "image" and c.name not in env_cls.SLOTS]
            if missing_slots:
                problems.append(f"constants {missing_slots} have no object slot in {cfg.env.name}")
            if cfg.blender != "neural" and cfg.train.force_beta is None and not rules.blend_rule_indices:
                problems.append(f"{cfg.blender} blender needs neural/1 and logic/1 blending rules")

    if problems:
        raise ConfigurationError("invalid run configuration", problems)
    return RunSetup(cfg, env_cls, language_path, rules_path, language_text, rules_text, rules, registry)


def build_agent(setup, seed=None):
    """Fresh agent for a validated setup; parameters are drawn from ``seed``."""
    cfg = setup.config
    torch.manual_seed(cfg.train.seed if seed is None else seed)
    logic = LogicPolicy(
        setup.rules,
        setup.registry,
        setup.env_cls.SLOTS,
        steps=cfg.reasoning_steps,
        gamma=cfg.softor_gamma,
    )
    raw_shape = (cfg.env.frame_stack, cfg.env.width, cfg.env.height, len(setup.env_cls.CHANNELS))
    return BlendedAgent(
        logic,
        raw_shape,
        len(setup.env_cls.SLOTS),
        len(COLUMNS),
        blend_mode=cfg.blender,
        force_beta=cfg.train.force_beta,
    )
