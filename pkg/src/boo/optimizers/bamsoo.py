"""Bayesian multi-scale optimistic optimisation (BaMSOO) baseline."""

from __future__ import annotations

import math

import numpy as np

from boo.optimizers.base import Optimizer, RunConfig, Steps, first_argmax
from boo.optimizers.trace import ExpansionRecord, RegretTrace
from boo.partition import PartitionScheme, Tree


class BaMSOO(Optimizer):
    """SOO where a child is evaluated only if its UCB reaches ``f+``.

    Children that fail the gate get their LCB as a surrogate score ``g``. The
    counter ``p`` advances once per child considered; it drives both the
    confidence schedule and the depth cap.
    """

    name = "bamsoo"
    uses_gp = True

    def __init__(self, domain, config: RunConfig | None = None):
        super().__init__(domain, config)
        self.scheme = (self.config.scheme or PartitionScheme(2, 1)).validate(self.dim)
        self.tree = Tree(self.dim)
        self.g: dict[tuple[int, int], float] = {}
        self.f_plus = -math.inf

    def _steps(self) -> Steps:
        cfg = self.config
        stop_at = cfg.budget + cfg.n_init
        yield from self.initial_design()
        tree, p = self.tree, 1
        root = tree.root
        self.g[root.key] = yield from self.evaluate(root.center, expansion=0, depth=-1)
        self.f_plus = self.best
        if self.n_evals >= stop_at:
            return
        stalled = False
        while True:
            v_max = -math.inf
            h = 0
            progressed = False
            while h <= self.depth_limit(tree, p, stalled):
                leaves = tree.leaves_at_depth(h)
                if leaves:
                    vals = np.array([self.g[c.key] for c in leaves])
                    j = first_argmax(vals)
                    if vals[j] >= v_max:
                        node = leaves[j]
                        ordinal = self.start_expansion()
                        record = ExpansionRecord(
                            ordinal=ordinal, p=p, depth=h, index=node.index, score=float(vals[j]),
                            depth_max=float(vals.max()), v_max=v_max, n_evals=0,
                            forced=h > cfg.depth_schedule(p),
                        )
                        self.log_expansion(record)
                        before = self.n_evals
                        for kid in tree.expand(node.key, self.scheme):
                            p += 1
                            mean, std = self.model.predict(kid.center)
                            b = self.beta_sqrt(p)
                            u = float(mean[0] + b * std[0])
                            passed = u >= self.f_plus
                            record.gates.append((kid.key, kid.center, u, self.f_plus, passed))
                            if passed:
                                g = yield from self.evaluate(kid.center, expansion=ordinal, depth=h)
                            else:
                                g = float(mean[0] - b * std[0])
                            self.g[kid.key] = g
                            if g > self.f_plus:
                                self.f_plus = g
                            record.n_evals = self.n_evals - before
                            if self.n_evals >= stop_at:
                                return
                        v_max = float(vals[j])
                        progressed = True
                        if ordinal >= cfg.expansion_cap:
                            return
                h += 1
            stalled = not progressed


def run_bamsoo(objective, config: RunConfig | None = None) -> RegretTrace:
    return BaMSOO(objective, config).run(objective)
