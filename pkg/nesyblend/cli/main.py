"""
Module comprising the ``nesyblend`` command line.

Exit status is 0 on success, 2 for invalid configuration, rules or
checkpoints and 3 for any other package error.

@date: Oct 2026
"""

__all__ = [
    "build_parser",
    "split_overrides",
    "config_from_args",
    "main",
]

import argparse
import dataclasses
import json
import logging
import pathlib
import sys

from ..common.errors import CheckpointError
from ..common.errors import ConfigurationError
from ..common.errors import GroundingError
from ..common.errors import LanguageError
from ..common.errors import NesyError
from ..common.errors import ParseError
from ..common.errors import SpecError
from ..common.logs import setup_logging
from ..common.resources import asset_path
from ..training.config import force_beta
from .checkpoint import load_checkpoint
from .commands import cmd_eval
from .commands import cmd_explain
from .commands import cmd_inspect_rules
from .commands import cmd_train
from .config import ENV_ASSETS
from .config import RunConfig
from .config import apply_overrides
from .config import parse_value
from .config import resolve_path

logger = logging.getLogger(__name__)

INPUT_ERRORS = (ConfigurationError, ParseError, SpecError, LanguageError, GroundingError, CheckpointError)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nesyblend",
        description="Train, evaluate and explain blended neural and logic policies.",
    )
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser(
        "train",
        help="train an agent",
        epilog="Any config field can be set with --<dotted.key> <value>, e.g. --train.learning_rate 1e-4.",
    )
    train.add_argument("--config", help="JSON run configuration")
    train.add_argument("--name", help="run name, the directory under --runs-dir")
    train.add_argument("--runs-dir")
    train.add_argument("--env", help="mini-kangaroo or mini-seaquest")
    train.add_argument("--rules", help="rule file")
    train.add_argument("--language", help="language file, defaults to the rule file with a .lang suffix")
    train.add_argument("--blender", choices=["logic", "neural", "rigid"])
    train.add_argument("--seed", type=int)
    train.add_argument("--total-timesteps", type=int)
    train.add_argument("--checkpoint-every", type=int, help="iterations between checkpoints")
    train.add_argument("--force-beta", type=float, help="constant blend weight in [0, 1]")
    train.add_argument("--freeze", action="append", choices=["neural", "logic", "blender"])
    train.add_argument("--mod", help="comma-separated environment flags")
    train.add_argument("--noise", type=float, help="objectness noise rate")
    train.add_argument("--resume", help="checkpoint to continue from")
    train.add_argument("--no-progress", action="store_true")

    evaluate = sub.add_parser("eval", help="evaluate a checkpoint or the random-policy baseline")
    evaluate.add_argument("checkpoint", nargs="?")
    evaluate.add_argument("--policy", choices=["checkpoint", "random"], default="checkpoint")
    evaluate.add_argument("--env", help="environment of --policy random, defaults to mini-kangaroo")
    evaluate.add_argument("--episodes", type=int, default=10)
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--mod", action="append",
                          help="comma-separated flags of one setting, 'none' for the plain game; repeatable")
    evaluate.add_argument("--noise", type=float, nargs="+", default=[0.0])
    evaluate.add_argument("--out", help="summary CSV, defaults to <run>/reports/eval.csv")

    explain = sub.add_parser("explain", help="explain the decisions of a checkpoint along a rollout")
    explain.add_argument("checkpoint")
    explain.add_argument("--steps", type=int, default=100)
    explain.add_argument("--seed", type=int, default=0)
    explain.add_argument("-k", type=int, default=3, help="fired rules per report")
    explain.add_argument("--ig-steps", type=int, default=64)
    explain.add_argument("--logic-target", choices=["value", "prob"], default="value",
                         help="differentiate the deduced action value or pi_logic(a | z)")
    explain.add_argument("--out")

    inspect = sub.add_parser("inspect-rules", help="parse, ground and summarize a rule file")
    inspect.add_argument("--env", default="mini-kangaroo")
    inspect.add_argument("--rules")
    inspect.add_argument("--language")
    inspect.add_argument("--dump", help="write the reasoning graph to this file")
    return parser


def split_overrides(tokens):
    """``["--train.seed", "3", "--name=x"]`` to ``{"train.seed": 3, "name": "x"}``."""
    overrides = {}
    tokens = list(tokens)
    while tokens:
        token = tokens.pop(0)
        if not token.startswith("--") or len(token) == 2:
            raise ConfigurationError(f"unexpected argument {token!r}")
        key = token[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        elif tokens and not tokens[0].startswith("--"):
            value = tokens.pop(0)
        else:
            raise ConfigurationError(f"override {token} needs a value")
        overrides[key] = parse_value(value)
    return overrides


def _flag_overrides(args):
    pairs = {
        "name": args.name,
        "runs_dir": args.runs_dir,
        "env.name": args.env,
        "rules": args.rules,
        "language": args.language,
        "blender": args.blender,
        "train.seed": args.seed,
        "env.seed": args.seed,
        "train.total_timesteps": args.total_timesteps,
        "train.checkpoint_every": args.checkpoint_every,
        "train.frozen": args.freeze,
        "env.modification.flags": None if args.mod is None else [f for f in args.mod.split(",") if f],
        "env.modification.noise": args.noise,
    }
    return {k: v for k, v in pairs.items() if v is not None}


def config_from_args(args, extra, base=None):
    """
    Run configuration of a ``train`` invocation.

    Precedence from low to high: ``base`` (a checkpoint's config), the
    ``--config`` file, the named flags and then the dotted overrides.
    """
    data = RunConfig().to_dict() if base is None else base
    if getattr(args, "config", None):
        path = pathlib.Path(args.config)
        if not path.is_file():
            raise ConfigurationError(f"config file not found: {path}")
        try:
            data = RunConfig.from_dict(json.loads(path.read_text(encoding="utf-8"))).to_dict()
        except ValueError as e:
            raise ConfigurationError(f"{path}: not valid JSON ({e})") from e
    data = apply_overrides(data, _flag_overrides(args))
    data = apply_overrides(data, extra)
    cfg = RunConfig.from_dict(data)
    if args.force_beta is not None:
        cfg = dataclasses.replace(cfg, train=force_beta(cfg.train, args.force_beta))
    return cfg


def _train(args, extra):
    resume = load_checkpoint(args.resume) if args.resume else None
    cfg = config_from_args(args, extra, base=resume["config"] if resume else None)
    run_dir = cmd_train(cfg, resume=resume, progress=not args.no_progress)
    print(f"run written to {run_dir}")


def _eval(args):
    if args.policy == "random":
        if args.checkpoint:
            raise ConfigurationError("--policy random takes no checkpoint")
        state = None
    else:
        if not args.checkpoint:
            raise ConfigurationError("eval needs a checkpoint unless --policy random is given")
        if args.env:
            raise ConfigurationError("--env only applies to --policy random; a checkpoint fixes its environment")
        state = load_checkpoint(args.checkpoint)
    settings = [() if m in ("none", "") else m for m in (args.mod or ["none"])]
    summary = cmd_eval(
        state,
        settings,
        noises=args.noise,
        episodes=args.episodes,
        seed=args.seed,
        out=args.out,
        env=args.env or "mini-kangaroo",
    )
    print(summary.to_string(index=False))


def _explain(args):
    out = cmd_explain(
        load_checkpoint(args.checkpoint),
        steps=args.steps,
        seed=args.seed,
        k=args.k,
        out=args.out,
        ig_steps=args.ig_steps,
        logic_target=args.logic_target,
    )
    print(f"explanations written to {out}")


def _inspect(args):
    stem = ENV_ASSETS.get(args.env)
    if stem is None:
        raise ConfigurationError(f"unknown environment {args.env!r}, expected one of {sorted(ENV_ASSETS)}")
    rules = resolve_path(args.rules) if args.rules else asset_path(f"{stem}.rules")
    if args.language:
        language = resolve_path(args.language)
    elif args.rules:
        language = rules.with_suffix(".lang")
    else:
        language = asset_path(f"{stem}.lang")
    print(cmd_inspect_rules(language, rules, dump=args.dump), end="")


def main(argv=None):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra and args.command != "train":
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    setup_logging(getattr(logging, args.log_level))

    try:
        if args.command == "train":
            _train(args, split_overrides(extra))
        elif args.command == "eval":
            _eval(args)
        elif args.command == "explain":
            _explain(args)
        else:
            _inspect(args)
    except INPUT_ERRORS as e:
        logger.error("%s", e)
        return 2
    except NesyError as e:
        logger.error("%s", e)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
