"""GP-UCB baseline with a multi-start coordinate-descent acquisition maximiser."""

from __future__ import annotations

import numpy as np

from boo.optimizers.base import Optimizer, RunConfig, Steps
from boo.optimizers.trace import RegretTrace


def coordinate_ascent(acq, starts: np.ndarray, iters: int, step0: float = 0.25, tol: float = 1e-9):
    """Maximise ``acq`` over ``[0, 1]^D`` from every start at once.

    Each iteration tries ``+/- step`` along every coordinate, keeping strict
    improvements; a start whose sweep found nothing halves its step. Returns the
    final points and their acquisition values.
    """
    X = starts.copy()
    vals = acq(X)
    step = np.full(len(X), step0)
    for _ in range(iters):
        moved = np.zeros(len(X), dtype=bool)
        for d in range(X.shape[1]):
            for sign in (1.0, -1.0):
                cand = X.copy()
                cand[:, d] = np.clip(X[:, d] + sign * step, 0.0, 1.0)
                cv = acq(cand)
                better = cv > vals
                X[better] = cand[better]
                vals[better] = cv[better]
                moved |= better
        step[~moved] *= 0.5
        if np.all(step < tol):
            break
    return X, vals


class GPUCB(Optimizer):
    """Standard BO loop maximising ``mu + sqrt(beta_t) sigma`` over the box.

    The maximiser runs ``n_starts`` seeded starts for at most ``cd_iters``
    coordinate sweeps and proposes the best end point that has not been
    evaluated yet (a fresh seeded uniform point if all have).
    """

    name = "gp_ucb"
    uses_gp = True

    def propose(self, t: int) -> np.ndarray:
        cfg = self.config
        rng = np.random.default_rng([cfg.seed, t])
        starts = rng.uniform(size=(cfg.n_starts, self.dim))
        b = self.beta_sqrt(t)

        def acq(X):
            mean, std = self.model.predict(X)
            return mean + b * std

        X, vals = coordinate_ascent(acq, starts, cfg.cd_iters)
        for i in np.argsort(-vals, kind="stable"):
            if X[i].tobytes() not in self.memo:
                return X[i]
        return rng.uniform(size=self.dim)

    def _steps(self) -> Steps:
        cfg = self.config
        stop_at = cfg.budget + cfg.n_init
        yield from self.initial_design()
        t = 1
        while self.n_evals < stop_at:
            u = self.propose(t)
            yield from self.evaluate(u, expansion=t, depth=-1)
            t += 1


def run_gp_ucb(objective, config: RunConfig | None = None) -> RegretTrace:
    return GPUCB(objective, config).run(objective)
