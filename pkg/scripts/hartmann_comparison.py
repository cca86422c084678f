"""Hartmann3 comparison of BOO, SOO, BaMSOO and GP-UCB with matched seeds.

Writes per-run traces and one aggregate JSON to ``--out`` and prints the
median final log10 regret per algorithm.
"""

import argparse

from boo.cli import summary_table
from boo.harness import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=200)
    ap.add_argument("--repeats", type=int, default=15)
    ap.add_argument("--algos", default="boo,soo,bamsoo,gp_ucb")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/hartmann")
    args = ap.parse_args()
    cfg = ExperimentConfig(func="hartmann3", algorithms=tuple(args.algos.split(",")), budget=args.budget,
                           repeats=args.repeats, workers=args.workers, out=args.out)
    print(summary_table(run_experiment(cfg)))


if __name__ == "__main__":
    main()
