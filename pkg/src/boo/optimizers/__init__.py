from boo.optimizers.bamsoo import BaMSOO, run_bamsoo
from boo.optimizers.base import BudgetExhausted, HyperPolicy, Optimizer, ProtocolError, RunConfig
from boo.optimizers.boo import BOO, run_boo
from boo.optimizers.gp_ucb import GPUCB, run_gp_ucb
from boo.optimizers.soo import SOO, run_soo
from boo.optimizers.trace import (
    EvalRecord,
    ExpansionRecord,
    RegretTrace,
    check_budget,
    check_depth_cap,
    check_expansion_legality,
    check_gates,
    depth_cap,
    simple_regret,
)

ALGORITHMS: dict[str, type[Optimizer]] = {
    "boo": BOO,
    "soo": SOO,
    "bamsoo": BaMSOO,
    "gp_ucb": GPUCB,
}


def make_optimizer(name: str, domain, config: RunConfig | None = None) -> Optimizer:
    try:
        cls = ALGORITHMS[name]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; available: {', '.join(ALGORITHMS)}") from None
    return cls(domain, config)


__all__ = [
    "ALGORITHMS", "BOO", "BaMSOO", "BudgetExhausted", "EvalRecord", "ExpansionRecord", "GPUCB",
    "HyperPolicy", "Optimizer", "ProtocolError", "RegretTrace", "RunConfig", "SOO",
    "check_budget", "check_depth_cap", "check_expansion_legality", "check_gates", "depth_cap",
    "make_optimizer", "run_bamsoo", "run_boo", "run_gp_ucb", "run_soo", "simple_regret",
]
