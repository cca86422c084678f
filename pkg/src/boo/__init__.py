"""Bayesian optimistic optimisation and tree-search / GP baselines."""

from boo.benchmarks import Objective, lookup, quadratic
from boo.kernel import MaternParams
from boo.optimizers import (
    BOO,
    GPUCB,
    SOO,
    BaMSOO,
    HyperPolicy,
    RunConfig,
    run_bamsoo,
    run_boo,
    run_gp_ucb,
    run_soo,
    simple_regret,
)
from boo.partition import PartitionScheme

__version__ = "0.1.0"

__all__ = [
    "BOO", "BaMSOO", "GPUCB", "HyperPolicy", "MaternParams", "Objective", "PartitionScheme",
    "RunConfig", "SOO", "lookup", "quadratic", "run_bamsoo", "run_boo", "run_gp_ucb", "run_soo",
    "simple_regret",
]
