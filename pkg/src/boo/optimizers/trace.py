"""Evaluation traces, simple regret, and post-hoc invariant checks."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass
class EvalRecord:
    eval: int  # number of true evaluations so far, including this one
    x: np.ndarray  # normalised point
    x_raw: np.ndarray
    value: float
    best: float
    expansion: int  # expansion (or iteration) ordinal; 0 for the initial design
    depth: int  # depth of the node being expanded, -1 when not applicable
    memo_hit: bool
    wall: float


@dataclass
class ExpansionRecord:
    ordinal: int
    p: int  # counter value used for the depth cap and confidence schedule
    depth: int
    index: int
    score: float  # selection score of the expanded node (U, f or g)
    depth_max: float  # largest score among leaves at this depth
    v_max: float  # threshold before the comparison
    n_evals: int  # true evaluations spent by this expansion
    forced: bool = False  # depth cap lifted because no leaf remained at or above it
    # BaMSOO only: (child key, child center, U at gate time, f+ at gate time, passed)
    gates: list[tuple[tuple[int, int], np.ndarray, float, float, bool]] = field(default_factory=list)


@dataclass
class RegretTrace:
    algorithm: str
    dim: int
    records: list[EvalRecord] = field(default_factory=list)
    expansions: list[ExpansionRecord] = field(default_factory=list)

    @property
    def evaluations(self) -> list[EvalRecord]:
        return [r for r in self.records if not r.memo_hit]

    @property
    def n_evals(self) -> int:
        return len(self.evaluations)

    @property
    def memo_hits(self) -> int:
        return sum(r.memo_hit for r in self.records)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.evaluations])

    @property
    def best_so_far(self) -> np.ndarray:
        return np.array([r.best for r in self.evaluations])

    def recommendation(self) -> tuple[np.ndarray, np.ndarray, float]:
        """``(x_norm, x_raw, value)`` of the best evaluated point (first on ties)."""
        evals = self.evaluations
        if not evals:
            raise ValueError("trace has no evaluations")
        i = int(np.argmax([r.value for r in evals]))
        return evals[i].x, evals[i].x_raw, evals[i].value


def simple_regret(trace: RegretTrace | list | np.ndarray, f_star: float) -> tuple[np.ndarray, np.ndarray]:
    """Regret after each true evaluation and its log10.

    Non-positive regrets map to ``-inf`` in the log series. A reference
    optimum below an observed value only triggers a warning.
    """
    values = trace.values if isinstance(trace, RegretTrace) else np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("cannot compute regret of an empty trace")
    best = np.maximum.accumulate(values)
    if best[-1] > f_star:
        warnings.warn(f"observed value {best[-1]!r} exceeds the reference optimum {f_star!r}", stacklevel=2)
    regret = f_star - best
    with np.errstate(divide="ignore", invalid="ignore"):
        log_regret = np.where(regret > 0, np.log10(np.where(regret > 0, regret, 1.0)), -np.inf)
    return regret, log_regret


def depth_cap(p: int) -> int:
    """``floor(sqrt(p))``."""
    return math.isqrt(p)


def check_depth_cap(trace: RegretTrace, schedule=depth_cap) -> list[str]:
    return [
        f"expansion at depth {e.depth} exceeds cap {schedule(e.p)} (p={e.p}{', stalled sweep' if e.forced else ''})"
        for e in trace.expansions
        if e.depth > schedule(e.p)
    ]


def check_expansion_legality(trace: RegretTrace) -> list[str]:
    """Every expanded node must be the depth-wise argmax and clear ``v_max``."""
    problems = []
    for e in trace.expansions:
        if e.score < e.v_max:
            problems.append(f"node ({e.depth},{e.index}) expanded with score {e.score} < v_max {e.v_max}")
        if e.score != e.depth_max:
            problems.append(f"node ({e.depth},{e.index}) score {e.score} is not the depth max {e.depth_max}")
    return problems


def check_gates(trace: RegretTrace) -> list[str]:
    """A gated child is evaluated, within its expansion, exactly when its UCB cleared ``f+``."""
    by_expansion: dict[int, set[bytes]] = {}
    for r in trace.records:
        by_expansion.setdefault(r.expansion, set()).add(r.x.tobytes())
    problems = []
    for e in trace.expansions:
        seen = by_expansion.get(e.ordinal, set())
        for key, center, u, f_plus, passed in e.gates:
            if passed != (u >= f_plus):
                problems.append(f"child {key}: gate recorded {passed} for U={u}, f+={f_plus}")
            if passed != (center.tobytes() in seen):
                problems.append(f"child {key}: gate {passed} disagrees with the evaluation log")
    return problems


def check_budget(trace: RegretTrace, budget: int, n_init: int = 0) -> list[str]:
    problems = []
    if trace.n_evals > budget + n_init:
        problems.append(f"{trace.n_evals} evaluations exceed budget {budget} + {n_init}")
    best = trace.best_so_far
    if best.size and np.any(np.diff(best) < 0):
        problems.append("best-so-far is not monotone")
    return problems
