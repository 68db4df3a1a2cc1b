"""Command-line entry point: list, inspect, play, run and preset."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from rlchallenges.core import ConfigError, ParameterError, RLChallengeError
from rlchallenges.envs import ENVIRONMENTS, VARIABLE_PARAMETERS, make
from rlchallenges.experiments import (
    PRESETS,
    aggregate,
    final_performance,
    load_config,
    preset,
    run_experiment,
    write_outputs,
)

EXIT_OK, EXIT_USER, EXIT_RUNTIME = 0, 1, 2

# escape sequences sent by arrow keys in line mode
ARROWS = {"\x1b[A": "up", "\x1b[B": "down", "\x1b[D": "left", "\x1b[C": "right"}


class UserError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER, f"{self.prog}: error: {message}\n")


class Style:
    def __init__(self, color: bool):
        self.color = color

    def bold(self, text: str) -> str:
        return f"\x1b[1m{text}\x1b[0m" if self.color else text

    def dim(self, text: str) -> str:
        return f"\x1b[2m{text}\x1b[0m" if self.color else text


def parse_params(items: list[str] | None) -> dict:
    """``key=value`` pairs; values are parsed as JSON when possible."""
    params = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise UserError(f"parameter {item!r} is not of the form key=value")
        try:
            params[key] = json.loads(raw)
        except json.JSONDecodeError:
            params[key] = raw
    return params


def _build_env(name: str, params: dict, seed: int):
    if name not in ENVIRONMENTS:
        raise UserError(f"unknown environment {name!r}; available: {', '.join(ENVIRONMENTS)}")
    try:
        return make(name, seed=seed, **params)
    except (ConfigError, ParameterError) as exc:
        raise UserError(str(exc)) from None


# -- subcommands -------------------------------------------------------------


def cmd_list(args, out=None) -> int:
    out = out or sys.stdout
    style = Style(args.color)
    out.write(style.bold(f"{'':3}{'environment':17}{'challenge':38}variable parameters") + "\n")
    for letter, (name, cls) in zip("abcdefghi", ENVIRONMENTS.items()):
        params = ", ".join(VARIABLE_PARAMETERS[name])
        out.write(f"{letter}. {name:17}{cls.challenge:38}{params}\n")
    return EXIT_OK


def cmd_inspect(args, out=None) -> int:
    out = out or sys.stdout
    env = _build_env(args.env, parse_params(args.param), args.seed)
    lines = [
        f"environment:       {args.env}",
        f"challenge:         {env.challenge}",
        f"observation space: {env.observation_space!r}",
        f"action space:      {env.action_space!r}",
        f"reward range:      {env.reward_range}",
        f"max steps:         {env.max_steps}",
        f"deterministic:     {env.deterministic}",
        f"variable params:   {', '.join(VARIABLE_PARAMETERS[args.env])}",
        "keys:              " + ", ".join(f"{k}={v}" for k, v in env.key_map().items()),
    ]
    out.write("\n".join(lines) + "\n")
    return EXIT_OK


def _action_for(key: str, key_map: dict):
    key = ARROWS.get(key, key)
    if key in key_map:
        action = key_map[key]
        return np.asarray(action, dtype=float) if isinstance(action, tuple) else action
    return None


def cmd_play(args, stdin=None, out=None) -> int:
    stdin, out = stdin or sys.stdin, out or sys.stdout
    if not stdin.isatty():
        raise UserError("play needs an interactive terminal (stdin is not a TTY)")
    env = _build_env(args.env, parse_params(args.param), args.seed)
    return play_session(env, stdin, out, Style(args.color))


def play_session(env, stdin, out, style: Style) -> int:
    """Line-based play loop; ``q`` quits. Shared by cmd_play and tests."""
    key_map = env.key_map()
    out.write(style.bold(f"{env.name}: {env.challenge}") + "\n")
    out.write("keys: " + ", ".join(f"{k} -> {v}" for k, v in key_map.items()) + ", q -> quit\n")
    env.reset()
    total = 0.0
    hint = ""
    while True:
        out.write(env.render() + "\n")
        if hint:
            out.write(style.dim(hint) + "\n")
            hint = ""
        out.write("> ")
        out.flush()
        line = stdin.readline()
        if not line:
            key = "q"
        else:
            key = line.rstrip("\n").strip() or line.rstrip("\n")
        if key == "q":
            out.write(f"quit; return so far {total:g}\n")
            return EXIT_OK
        action = _action_for(key, key_map)
        if action is None:
            hint = f"unknown key {key!r}; valid keys: {', '.join(key_map)} or q"
            continue
        step = env.step(action)
        total += step.reward
        status = "terminated" if step.terminated else ("truncated" if step.truncated else "")
        out.write(f"reward {step.reward:g} {status}".rstrip() + "\n")
        if step.done:
            out.write(env.render() + "\n")
            out.write(f"episode over; return {total:g}\n")
            return EXIT_OK


def cmd_run(args, out=None) -> int:
    out = out or sys.stdout
    if bool(args.config) == bool(args.preset):
        raise UserError("give exactly one of --config or --preset")
    try:
        cfg = load_config(args.config) if args.config else preset(args.preset)
    except ConfigError as exc:
        raise UserError(str(exc)) from None
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.repetitions is not None:
        cfg.repetitions = args.repetitions
    if args.steps is not None:
        cfg.total_steps = args.steps
    try:
        cfg.validate()
    except ConfigError as exc:
        raise UserError(str(exc)) from None
    out_dir = Path(args.out)
    record = run_experiment(cfg, jobs=args.jobs)
    curves = aggregate(record)
    csv_path, svg_path = out_dir / f"{cfg.name}.csv", out_dir / f"{cfg.name}.svg"
    write_outputs(curves, csv_path, svg_path, title=cfg.name)
    width = max(len(c.agent) for c in curves)
    out.write(f"{'agent':{width}}  final mean return\n")
    for c in curves:
        out.write(f"{c.agent:{width}}  {final_performance(c):.4f}\n")
    out.write(f"wrote {csv_path} and {svg_path}\n")
    return EXIT_OK


def cmd_preset(args, out=None) -> int:
    out = out or sys.stdout
    if args.name is None:
        out.write("\n".join(PRESETS) + "\n")
        return EXIT_OK
    try:
        cfg = preset(args.name)
    except ConfigError as exc:
        raise UserError(str(exc)) from None
    text = cfg.dumps()
    if args.write:
        Path(args.write).write_text(text)
        out.write(f"wrote {args.write}\n")
    else:
        out.write(text)
    return EXIT_OK


# -- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rlchallenges", description="Challenge-isolating RL environments and experiments.")
    parser.add_argument("--no-color", dest="color", action="store_false", help="disable ANSI styling")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="list the nine environments")
    p.set_defaults(func=cmd_list)

    def env_args(p):
        p.add_argument("env", help="environment name (see `list`)")
        p.add_argument("--param", "-p", action="append", metavar="KEY=VALUE", help="environment parameter")
        p.add_argument("--seed", type=int, default=0, help="environment seed (default 0)")

    p = sub.add_parser("inspect", help="show spaces, defaults and key bindings of an environment")
    env_args(p)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("play", help="play an environment in the terminal (type a key, then Enter)")
    env_args(p)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("run", help="run an experiment from a config file or preset")
    p.add_argument("--config", help="path to a JSON experiment config")
    p.add_argument("--preset", help=f"preset name: {', '.join(PRESETS)}")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--seed", type=int, help="override base_seed")
    p.add_argument("--repetitions", type=int, help="override the number of repetitions")
    p.add_argument("--steps", type=int, help="override total_steps")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for repetitions (default 1)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="list presets or print one as an editable config")
    p.add_argument("name", nargs="?", help="preset name; omit to list all")
    p.add_argument("--write", metavar="PATH", help="write the config to PATH instead of stdout")
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.color and not sys.stdout.isatty():
        args.color = False
    try:
        return args.func(args)
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_RUNTIME
    except (RLChallengeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
