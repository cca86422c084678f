"""Branch-factor ablation at m = 64: BOO with b = 1 against b = D, plus BaMSOO with b = 1."""

import argparse

from boo.cli import ablation_configs, summary_table
from boo.harness import ExperimentConfig, run_experiment
from boo.partition import PartitionScheme


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--func", default="hartmann3")
    ap.add_argument("--m", type=int, default=64)
    ap.add_argument("--budget", type=int, default=200)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/ablation")
    args = ap.parse_args()
    base = ExperimentConfig(func=args.func, budget=args.budget, repeats=args.repeats, workers=args.workers,
                            out=args.out)
    for cfg in ablation_configs(base, args.m):
        print(summary_table(run_experiment(cfg), title=f"[{cfg.label}] {PartitionScheme(*cfg.scheme)}"))
        print()


if __name__ == "__main__":
    main()
