"""Command-line interface.

    bp-assign <subcommand> [--config PATH] [--seed S --n N --k K --out DIR]

Subcommands: generate | bp | exact | error-curve | zeta2 | ks | pwit |
toperator | argmin-diag.  Exit codes: 0 success, 2 configuration error,
3 threshold violation under --check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bp
from .exact import solve_exact
from .experiments import (ConfigError, ExperimentConfig, run_experiment, write_result)
from .instances import exponential, generate, load_matrix, rescale, save_matrix, uniform01


def _distribution(args):
    if args.dist == "exponential":
        return exponential(args.rate)
    return uniform01()


def _instance_from_args(args):
    """Either load --matrix (CSV + sidecar) or generate from flags."""
    if getattr(args, "matrix", None):
        cost, dist = load_matrix(args.matrix)
    else:
        if args.n is None or args.seed is None:
            raise ConfigError("need --matrix or both --n and --seed")
        dist = _distribution(args)
        cost = generate(args.n, dist, args.seed)
    if getattr(args, "rescaled", False) and not cost.rescaled:
        cost = rescale(cost, dist)
    return cost, dist


def _cmd_generate(args) -> int:
    if args.n is None or args.seed is None:
        raise ConfigError("generate needs --n and --seed")
    dist = _distribution(args)
    cost = generate(args.n, dist, args.seed)
    if args.rescaled:
        cost = rescale(cost, dist)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"matrix_n{cost.n}_seed{cost.seed}.csv"
    sidecar = save_matrix(cost, dist, csv_path)
    print(f"wrote {csv_path} and {sidecar}")
    return 0


def _cmd_bp(args) -> int:
    cost, _ = _instance_from_args(args)
    steps = args.k if args.k is not None else 30
    result = bp.run(cost, steps)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    decision_path = out / f"decision_n{cost.n}_k{steps}.csv"
    with open(decision_path, "w", newline="\n") as f:
        f.write("side,index,choice\n")
        for i, c in enumerate(result.decision.row_choice):
            f.write(f"row,{i},{c}\n")
        for j, r in enumerate(result.decision.col_choice):
            f.write(f"col,{j},{r}\n")
    messages_path = out / f"messages_n{cost.n}_k{steps}.npz"
    np.savez(messages_path, n=cost.n, k=result.state.k,
             row_to_col=result.state.row_to_col, col_to_row=result.state.col_to_row)
    print(f"wrote {decision_path} and {messages_path}")
    return 0


def _cmd_exact(args) -> int:
    cost, _ = _instance_from_args(args)
    assignment = solve_exact(cost)
    payload = json.dumps({"permutation": assignment.row_to_col.tolist(),
                          "value": assignment.value})
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"exact_n{cost.n}_seed{cost.seed}.json"
        path.write_text(payload + "\n")
        print(f"wrote {path}")
    else:
        print(payload)
    return 0


def _experiment_config(args) -> ExperimentConfig:
    raw: dict = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except FileNotFoundError as e:
            raise ConfigError(f"config file not found: {e.filename}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    declared = raw.get("experiment")
    if declared is not None and declared != args.command:
        raise ConfigError(
            f"config declares experiment {declared!r} but subcommand is {args.command!r}")
    raw["experiment"] = args.command
    if args.n is not None:
        raw["n"] = [args.n]
    if args.k is not None:
        raw["k"] = [args.k]
    if args.seed is not None:
        raw["seeds"] = [args.seed]
    if args.out is not None:
        raw["out_dir"] = args.out
    for flag, key in (("lo", "grid_lo"), ("hi", "grid_hi"), ("step", "grid_step"),
                      ("double_steps", "double_steps")):
        value = getattr(args, flag, None)
        if value is not None:
            raw[key] = value
    return ExperimentConfig.from_dict(raw)


def _cmd_experiment(args) -> int:
    config = _experiment_config(args)
    result = run_experiment(config)
    written = write_result(result, config.out_dir)
    for path in written:
        print(f"wrote {path}")
    for check in result.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"[{status}] {check.label}: {check.detail}")
    if args.check and result.failed_checks():
        return 3
    return 0


def _add_instance_flags(sub, with_matrix: bool) -> None:
    if with_matrix:
        sub.add_argument("--matrix", help="CSV matrix path (with JSON sidecar)")
    sub.add_argument("--n", type=int, help="instance size")
    sub.add_argument("--seed", type=int, help="instance seed")
    sub.add_argument("--dist", choices=("uniform01", "exponential"), default="uniform01")
    sub.add_argument("--rate", type=float, default=1.0)
    sub.add_argument("--rescaled", action="store_true",
                     help="multiply entries by n * density-at-zero")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bp-assign", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("generate", help="write a cost matrix and its sidecar")
    _add_instance_flags(gen, with_matrix=False)
    gen.add_argument("--out", default="out")
    gen.set_defaults(func=_cmd_generate)

    bp_cmd = commands.add_parser("bp", help="run message passing on one instance")
    _add_instance_flags(bp_cmd, with_matrix=True)
    bp_cmd.add_argument("--k", type=int, help="number of updates (default 30)")
    bp_cmd.add_argument("--out", default="out")
    bp_cmd.set_defaults(func=_cmd_bp)

    exact_cmd = commands.add_parser("exact", help="solve one instance exactly")
    _add_instance_flags(exact_cmd, with_matrix=True)
    exact_cmd.add_argument("--out", help="write JSON here instead of stdout")
    exact_cmd.set_defaults(func=_cmd_exact)

    for name in ("error-curve", "zeta2", "ks", "pwit", "toperator", "argmin-diag"):
        sub = commands.add_parser(name, help=f"run the {name} experiment")
        sub.add_argument("--config", help="JSON config path")
        sub.add_argument("--seed", type=int, help="run a single seed")
        sub.add_argument("--n", type=int, help="single instance size")
        sub.add_argument("--k", type=int, help="single step count")
        sub.add_argument("--out", help="output directory")
        sub.add_argument("--check", action="store_true",
                         help="exit 3 if any documented threshold fails")
        if name in ("ks", "toperator"):
            sub.add_argument("--lo", type=float, help="grid lower edge")
            sub.add_argument("--hi", type=float, help="grid upper edge")
            sub.add_argument("--step", type=float, help="grid step")
            sub.add_argument("--double-steps", type=int, dest="double_steps",
                             help="number of double applications")
        sub.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
