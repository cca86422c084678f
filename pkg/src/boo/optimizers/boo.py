"""Bayesian optimistic optimisation: UCB-driven tree search with parent-only sampling."""

from __future__ import annotations

import math

import numpy as np

from boo.optimizers.base import Optimizer, RunConfig, Steps, first_argmax
from boo.optimizers.trace import ExpansionRecord, RegretTrace
from boo.partition import PartitionScheme, Tree


class BOO(Optimizer):
    """Sweep the tree depth by depth; at each depth expand the leaf with the
    largest UCB at its center if that UCB is at least ``v_max``, and evaluate
    the objective only at the expanded node's own center.

    The run stops once ``budget`` true evaluations have been made (initial
    design excluded). Expansions whose center is already memoised cost no
    evaluation and add no GP row.
    """

    name = "boo"
    uses_gp = True

    def __init__(self, domain, config: RunConfig | None = None):
        super().__init__(domain, config)
        scheme = self.config.scheme or PartitionScheme.auto(self.config.budget, self.dim)
        self.scheme = scheme.validate(self.dim)
        self.tree = Tree(self.dim)
        # leaf key -> (gp generation, mean, std)
        self._post_cache: dict[tuple[int, int], tuple[int, float, float]] = {}

    def leaf_ucb(self, leaves, p: int) -> np.ndarray:
        stale = [c for c in leaves if self._post_cache.get(c.key, (-1,))[0] != self.gp_generation]
        if stale:
            mean, std = self.model.predict(np.array([c.center for c in stale]))
            for c, m, s in zip(stale, mean, std):
                self._post_cache[c.key] = (self.gp_generation, float(m), float(s))
        b = self.beta_sqrt(p)
        return np.array([self._post_cache[c.key][1] + b * self._post_cache[c.key][2] for c in leaves])

    def _steps(self) -> Steps:
        cfg = self.config
        stop_at = cfg.budget + cfg.n_init
        yield from self.initial_design()
        tree, p = self.tree, 1
        flip = cfg.fault == "flip_ucb"
        stalled = False
        while True:
            v_max = -math.inf
            h = 0
            progressed = False
            while h <= self.depth_limit(tree, p, stalled):
                leaves = tree.leaves_at_depth(h)
                if leaves:
                    ucb = self.leaf_ucb(leaves, p)
                    score = -ucb if flip else ucb
                    j = first_argmax(score)
                    if score[j] >= v_max:
                        node = leaves[j]
                        ordinal = self.start_expansion()
                        self._post_cache.pop(node.key, None)
                        tree.expand(node.key, self.scheme)
                        before = self.n_evals
                        value = yield from self.evaluate(node.center, expansion=ordinal, depth=h)
                        self.log_expansion(ExpansionRecord(
                            ordinal=ordinal, p=p, depth=h, index=node.index, score=float(ucb[j]),
                            depth_max=float(ucb.max()), v_max=v_max, n_evals=self.n_evals - before,
                            forced=h > cfg.depth_schedule(p),
                        ))
                        v_max = max(value, v_max)
                        p += 1
                        progressed = True
                        if self.n_evals >= stop_at or ordinal >= cfg.expansion_cap:
                            return
                h += 1
            stalled = not progressed


def run_boo(objective, config: RunConfig | None = None) -> RegretTrace:
    return BOO(objective, config).run(objective)
