"""Shared optimiser machinery: configuration, memoised evaluation, GP state, ask/tell.

Each algorithm is written as a generator that yields normalised points and
receives their objective values. :meth:`Optimizer.run` and the ask/tell pair
both drive that one generator, so the two are equivalent by construction.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Generator

import numpy as np

from boo import gp
from boo.benchmarks import Objective
from boo.kernel import MaternParams, default_nu
from boo.optimizers.trace import EvalRecord, ExpansionRecord, RegretTrace, depth_cap
from boo.partition import PartitionScheme

Steps = Generator[np.ndarray, float, None]


class BudgetExhausted(RuntimeError):
    """Raised by :meth:`Optimizer.ask` once the evaluation budget is spent."""

    def __init__(self, msg: str = "budget exhausted"):
        super().__init__(msg)


class ProtocolError(RuntimeError):
    """``tell`` did not echo the last point returned by ``ask``."""


@dataclass(frozen=True)
class HyperPolicy:
    """Kernel hyperparameters: fixed, or refit by grid MLE every ``refit_every`` evaluations.

    ``nu=None`` means ``4 + (D + 1) / 2``. In ``"mle"`` mode the fixed values
    are used until the first refit.
    """

    mode: str = "fixed"
    lengthscale: float = 0.1
    variance: float = 1.0
    nu: float | None = None
    refit_every: int = 10

    def __post_init__(self):
        if self.mode not in ("fixed", "mle"):
            raise ValueError(f"hyperparameter mode must be 'fixed' or 'mle', got {self.mode!r}")
        if self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")

    def initial(self, dim: int) -> MaternParams:
        nu = default_nu(dim) if self.nu is None else self.nu
        return MaternParams(nu, self.lengthscale, self.variance)


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by all optimisers.

    ``scheme=None`` picks the algorithm's default: the budget-driven automatic
    scheme for BOO, and the two-way split of the longest side for SOO and
    BaMSOO. ``fault`` is a test hook for the validation suite.
    """

    budget: int = 100
    scheme: PartitionScheme | None = None
    eta: float = 0.05
    n_init: int = 0
    seed: int = 0
    hyper: HyperPolicy = field(default_factory=HyperPolicy)
    depth_schedule: Callable[[int], int] = depth_cap
    n_starts: int = 16
    cd_iters: int = 200
    max_expansions: int | None = None
    fault: str | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        if self.n_init < 0:
            raise ValueError("n_init must be >= 0")
        if self.fault not in (None, "flip_ucb"):
            raise ValueError(f"unknown fault hook {self.fault!r}")

    @property
    def expansion_cap(self) -> int:
        return self.max_expansions if self.max_expansions is not None else 50 * self.budget + 1000


class Optimizer:
    """Base class; subclasses implement :meth:`_steps`."""

    name = "base"
    uses_gp = False

    def __init__(self, domain: Objective | tuple, config: RunConfig | None = None):
        if isinstance(domain, Objective):
            lower, upper = domain.lower, domain.upper
        else:
            lower, upper = domain
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.dim = self.lower.size
        self.config = config if config is not None else RunConfig()
        self.trace = RegretTrace(self.name, self.dim)
        self.memo: dict[bytes, float] = {}
        self.n_evals = 0
        self.best = -math.inf
        self._t0 = time.perf_counter()
        self._expansion_ordinal = 0
        if self.uses_gp:
            self.params = self.config.hyper.initial(self.dim)
            self.data = gp.ObservationSet.empty(self.dim)
            self.model = gp.fit(self.params, self.data)
            self.gp_generation = 0
        self._gen: Steps | None = None
        self._pending: np.ndarray | None = None
        self._done = False

    # -- domain mapping ---------------------------------------------------
    def to_raw(self, u: np.ndarray) -> np.ndarray:
        return self.lower + u * (self.upper - self.lower)

    # -- ask / tell ---------------------------------------------------------
    def _advance(self, value: float | None) -> None:
        try:
            if self._gen is None:
                self._gen = self._steps()
                u = next(self._gen)
            else:
                u = self._gen.send(value)
        except StopIteration:
            self._pending = None
            self._done = True
            return
        self._pending = u

    def ask(self) -> np.ndarray:
        """Next point to evaluate, in the caller's (raw) coordinates."""
        if self._pending is None and not self._done:
            self._advance(None)
        if self._done:
            raise BudgetExhausted()
        return self.to_raw(self._pending)

    def tell(self, x, value: float) -> None:
        if self._pending is None:
            raise ProtocolError("tell called without a pending ask")
        if not np.array_equal(np.asarray(x, dtype=float), self.to_raw(self._pending)):
            raise ProtocolError(f"told point {np.asarray(x).tolist()} differs from the asked point")
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"objective returned a non-finite value {value!r}")
        self._pending = None
        self._advance(value)

    @property
    def finished(self) -> bool:
        if self._pending is None and not self._done:
            self._advance(None)
        return self._done

    def run(self, objective: Callable[[np.ndarray], float]) -> RegretTrace:
        while True:
            try:
                x = self.ask()
            except BudgetExhausted:
                return self.trace
            self.tell(x, objective(x))

    # -- evaluation ---------------------------------------------------------
    def budget_left(self) -> int:
        return self.config.budget + self.config.n_init - self.n_evals

    def evaluate(self, u: np.ndarray, expansion: int, depth: int) -> Generator[np.ndarray, float, float]:
        """Memoised evaluation at normalised ``u``; yields only on a memo miss."""
        key = u.tobytes()
        if key in self.memo:
            value = self.memo[key]
            self._record(u, value, expansion, depth, memo_hit=True)
            return value
        value = yield u
        self.memo[key] = value
        self.n_evals += 1
        self.best = max(self.best, value)
        self._record(u, value, expansion, depth, memo_hit=False)
        if self.uses_gp:
            self._observe(u, value)
        return value

    def _record(self, u, value, expansion, depth, memo_hit):
        self.trace.records.append(EvalRecord(
            eval=self.n_evals, x=u.copy(), x_raw=self.to_raw(u), value=value,
            best=self.best, expansion=expansion, depth=depth, memo_hit=memo_hit,
            wall=time.perf_counter() - self._t0,
        ))

    def initial_design(self) -> Generator[np.ndarray, float, None]:
        if self.config.n_init == 0:
            return
        rng = np.random.default_rng(self.config.seed)
        for u in rng.uniform(size=(self.config.n_init, self.dim)):
            yield from self.evaluate(u, expansion=0, depth=-1)

    def start_expansion(self) -> int:
        self._expansion_ordinal += 1
        return self._expansion_ordinal

    def log_expansion(self, record: ExpansionRecord) -> None:
        self.trace.expansions.append(record)

    # -- GP ---------------------------------------------------------------
    def _observe(self, u: np.ndarray, value: float) -> None:
        hyper = self.config.hyper
        n = len(self.data) + 1
        if hyper.mode == "mle" and n >= 2 and n % hyper.refit_every == 0:
            self.data = self.data.append(u, value)
            grid = gp.default_grid(self.data.values, self.dim)
            self.params = gp.fit_hyperparameters(self.data, self.params.nu, grid)
            self.model = gp.fit(self.params, self.data)
        else:
            self.model = self.model.extend(u, value)
            self.data = self.model.data
        self.gp_generation += 1

    def depth_limit(self, tree, p: int, stalled: bool) -> int:
        """Deepest level a sweep may visit.

        Normally ``min(depth(T), h_max(p))``. If the previous sweep expanded
        nothing because every node above the cap was already expanded, the cap
        is lifted to the shallowest leaf so the search can continue.
        """
        cap = self.config.depth_schedule(p)
        if stalled:
            cap = max(cap, tree.min_leaf_depth)
        return min(tree.depth, cap)

    def beta_sqrt(self, p: int) -> float:
        return math.sqrt(gp.beta(p, self.config.eta))

    def _steps(self) -> Steps:  # pragma: no cover
        raise NotImplementedError
        yield


def first_argmax(values) -> int:
    """Index of the maximum; the lowest index wins ties."""
    return int(np.argmax(values))
