"""Command-line interface.

  pacsim run <config.yaml> [--out DIR] [--seed N]     single experiment
  pacsim suite <config.yaml> [--out DIR] [--seed N]   batch with summary.csv
  pacsim compare <stepsA.csv> <stepsB.csv>            Wilcoxon on residuals

Exit status is nonzero when a run diverges.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from .experiment import DivergenceError, ExperimentConfig, read_step_csv, run_experiment, run_suite, summary_row
from .stats import wilcoxon_signed_rank


def _load_yaml(path: str) -> dict:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a mapping at the top level")
    return data


def _configs_from_file(path: str, seed: int | None) -> list[ExperimentConfig]:
    data = _load_yaml(path)
    raw_list = data["experiments"] if "experiments" in data else [data]
    configs = []
    for raw in raw_list:
        if seed is not None:
            raw = {**raw, "seed": seed}
        configs.append(ExperimentConfig.from_dict(raw))
    return configs


def _cmd_run(args) -> int:
    configs = _configs_from_file(args.config, args.seed)
    if len(configs) != 1:
        print("run expects a single-experiment config; use `suite` for batches", file=sys.stderr)
        return 2
    try:
        result = run_experiment(configs[0], out_dir=args.out)
    except DivergenceError as exc:
        print(f"DIVERGED: {exc}", file=sys.stderr)
        return 1
    row = summary_row(result)
    print(", ".join(f"{k}={v}" for k, v in row.items()))
    return 0


def _cmd_suite(args) -> int:
    configs = _configs_from_file(args.config, args.seed)
    try:
        results = run_suite(configs, out_dir=args.out)
    except DivergenceError as exc:
        print(f"DIVERGED: {exc}", file=sys.stderr)
        return 1
    for result in results:
        row = summary_row(result)
        print(", ".join(f"{k}={v}" for k, v in row.items()))
    print(f"summary: {Path(args.out) / 'summary.csv'}")
    return 0


def _residuals(path: str) -> np.ndarray:
    cols = read_step_csv(path)
    y = np.array([v for v in cols["y"]], dtype=float)
    y_r = np.array([v for v in cols["y_r"]], dtype=float)
    return np.abs(y_r - y)


def _cmd_compare(args) -> int:
    a = _residuals(args.csv_a)
    b = _residuals(args.csv_b)
    n = min(len(a), len(b))
    result = wilcoxon_signed_rank(a[:n], b[:n], alpha=args.alpha)
    print(f"p={result.p:.6g}, h={result.h}, W={result.w}, n={result.n}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="pacsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single experiment")
    p_run.add_argument("config")
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.set_defaults(func=_cmd_run)

    p_suite = sub.add_parser("suite", help="run a batch of experiments")
    p_suite.add_argument("config")
    p_suite.add_argument("--out", default="out")
    p_suite.add_argument("--seed", type=int, default=None)
    p_suite.set_defaults(func=_cmd_suite)

    p_cmp = sub.add_parser("compare", help="Wilcoxon signed-rank test on two step logs")
    p_cmp.add_argument("csv_a")
    p_cmp.add_argument("csv_b")
    p_cmp.add_argument("--alpha", type=float, default=0.05)
    p_cmp.set_defaults(func=_cmd_compare)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
