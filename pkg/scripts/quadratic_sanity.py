"""All four algorithms on the 2-D quadratic with optimum (0.33, 0.77); prints final regrets per seed."""

import argparse

import numpy as np

from boo.benchmarks import lookup
from boo.optimizers import ALGORITHMS, RunConfig, make_optimizer, simple_regret


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=100)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--n-init", type=int, default=0)
    args = ap.parse_args()
    f = lookup("quadratic2d")
    for name in ALGORITHMS:
        regrets = []
        for seed in range(args.seeds):
            tr = make_optimizer(name, f, RunConfig(budget=args.budget, seed=seed, n_init=args.n_init)).run(f)
            regrets.append(simple_regret(tr, f.f_star)[0][-1])
        per_seed = " ".join(f"{r:.1e}" for r in regrets)
        print(f"{name:<8} median regret {np.median(regrets):.3e}  per seed {per_seed}")


if __name__ == "__main__":
    main()
