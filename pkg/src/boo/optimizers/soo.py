"""Simultaneous optimistic optimisation (model-free baseline)."""

from __future__ import annotations

import math

from boo.optimizers.base import Optimizer, RunConfig, Steps, first_argmax
from boo.optimizers.trace import ExpansionRecord, RegretTrace
from boo.partition import PartitionScheme, Tree, split


class SOO(Optimizer):
    """Expand the best-valued leaf per depth and evaluate all of its children.

    The root center is evaluated first. An expansion is only started when the
    remaining budget covers all of its (non-memoised) children, so every
    expansion costs exactly ``m`` evaluations up to memo hits. ``n_init`` is
    ignored. The counter ``p`` advances once per child, so the depth cap grows
    with the number of evaluated nodes.
    """

    name = "soo"

    def __init__(self, domain, config: RunConfig | None = None):
        config = config if config is not None else RunConfig()
        if config.n_init:
            from dataclasses import replace

            config = replace(config, n_init=0)
        super().__init__(domain, config)
        self.scheme = (self.config.scheme or PartitionScheme(2, 1)).validate(self.dim)
        self.tree = Tree(self.dim)
        self.f: dict[tuple[int, int], float] = {}

    def _steps(self) -> Steps:
        cfg = self.config
        tree, p = self.tree, 1
        self.f[tree.root.key] = yield from self.evaluate(tree.root.center, expansion=0, depth=-1)
        stalled = False
        while True:
            v_max = -math.inf
            h = 0
            progressed = False
            while h <= self.depth_limit(tree, p, stalled):
                leaves = tree.leaves_at_depth(h)
                if leaves:
                    vals = [self.f[c.key] for c in leaves]
                    j = first_argmax(vals)
                    if vals[j] >= v_max:
                        node = leaves[j]
                        needed = sum(k.center.tobytes() not in self.memo for k in split(node, self.scheme))
                        if needed > self.budget_left():
                            return
                        ordinal = self.start_expansion()
                        before = self.n_evals
                        record = ExpansionRecord(
                            ordinal=ordinal, p=p, depth=h, index=node.index, score=vals[j],
                            depth_max=max(vals), v_max=v_max, n_evals=0,
                            forced=h > cfg.depth_schedule(p),
                        )
                        for kid in tree.expand(node.key, self.scheme):
                            self.f[kid.key] = yield from self.evaluate(kid.center, expansion=ordinal, depth=h)
                            p += 1
                        record.n_evals = self.n_evals - before
                        self.log_expansion(record)
                        v_max = vals[j]
                        progressed = True
                        if self.budget_left() <= 0 or ordinal >= cfg.expansion_cap:
                            return
                h += 1
            stalled = not progressed


def run_soo(objective, config: RunConfig | None = None) -> RegretTrace:
    return SOO(objective, config).run(objective)
