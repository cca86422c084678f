"""Noiseless Gaussian-process regression with a zero prior mean.

Posterior mean and variance are computed from a Cholesky factor of the
(slightly jittered) Gram matrix. Jitter starts at ``1e-12 * variance`` and is
escalated tenfold on each failed factorisation, up to ``1e-6 * variance``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from boo.kernel import MaternParams, correlation, cross_covariance, distances, gram

JITTER_START = 1e-12
JITTER_MAX = 1e-6
REFINE_STEPS = 3
LOG_2PI = math.log(2.0 * math.pi)


class IllConditionedGramError(np.linalg.LinAlgError):
    """Cholesky factorisation failed even at the largest allowed jitter."""


@dataclass(frozen=True)
class ObservationSet:
    """Ordered, pairwise-distinct observations ``(x_i, y_i)``."""

    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        values = np.asarray(self.values, dtype=float).ravel()
        if points.ndim == 1:
            points = points.reshape(len(values), -1) if len(values) else points.reshape(0, 0)
        if points.shape[0] != values.shape[0]:
            raise ValueError(f"{points.shape[0]} points but {values.shape[0]} values")
        if len({p.tobytes() for p in points}) != len(points):
            raise ValueError("observation points must be pairwise distinct")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)

    @classmethod
    def empty(cls, dim: int) -> "ObservationSet":
        return cls(np.zeros((0, dim)), np.zeros(0))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def append(self, x, y: float) -> "ObservationSet":
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return ObservationSet(np.vstack([self.points, x]), np.append(self.values, float(y)))


def beta(p: int, eta: float) -> float:
    """Exploration coefficient ``2 log(pi^2 p^3 / (3 eta))``."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    return 2.0 * math.log(math.pi**2 * p**3 / (3.0 * eta))


@dataclass(frozen=True)
class ConfidenceParams:
    eta: float
    p: int

    def __post_init__(self):
        beta(self.p, self.eta)  # validates

    @property
    def beta(self) -> float:
        return beta(self.p, self.eta)


def _nearest_pair(X: np.ndarray) -> tuple[int, int, float]:
    r = distances(X, X)
    np.fill_diagonal(r, np.inf)
    i, j = np.unravel_index(np.argmin(r), r.shape)
    return int(min(i, j)), int(max(i, j)), float(r[i, j])


def _cholesky(K: np.ndarray, variance: float, X: np.ndarray) -> tuple[np.ndarray, float]:
    n = K.shape[0]
    if n == 0:
        return np.zeros((0, 0)), 0.0
    jitter = JITTER_START * variance
    while True:
        try:
            return np.linalg.cholesky(K + jitter * np.eye(n)), jitter
        except np.linalg.LinAlgError:
            if jitter >= JITTER_MAX * variance * (1 - 1e-9):
                i, j, r = _nearest_pair(X)
                raise IllConditionedGramError(
                    f"ill-conditioned Gram matrix (n={n}, jitter={jitter:.1e}); "
                    f"nearest points are #{i} {X[i].tolist()} and #{j} {X[j].tolist()} at distance {r:.3e}"
                ) from None
            jitter *= 10.0


@dataclass(frozen=True)
class GPModel:
    """A fitted noiseless GP. Immutable; :meth:`extend` returns a new model."""

    params: MaternParams
    data: ObservationSet
    chol: np.ndarray
    jitter: float
    gram: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.data.dim

    def _mean_var(self, X) -> tuple[np.ndarray, np.ndarray]:
        # With k the cross-covariances and A = K + jitter I, the noiseless
        # variance is var0 - k'K^{-1}k = var0 - k'A^{-1}k - jitter |A^{-1}k|^2
        # up to a term smaller by a further factor jitter |K^{-1}|.
        k = cross_covariance(self.params, self.data.points, X)
        v = solve_triangular(self.chol, k, lower=True)
        w = solve_triangular(self.chol.T, v, lower=False)
        var = self.params.variance - np.einsum("ij,ij->j", v, v) - self.jitter * np.einsum("ij,ij->j", w, w)
        return k.T @ self.alpha, var

    def raw_variance(self, X) -> np.ndarray:
        """Posterior variance before clamping at zero."""
        X = self._query(X)
        if len(self.data) == 0:
            return np.full(len(X), self.params.variance)
        return self._mean_var(X)[1]

    def predict(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and standard deviation at each row of ``X``."""
        X = self._query(X)
        if len(self.data) == 0:
            return np.zeros(len(X)), np.full(len(X), math.sqrt(self.params.variance))
        mean, var = self._mean_var(X)
        return mean, np.sqrt(np.maximum(var, 0.0))

    def extend(self, x, y: float) -> "GPModel":
        """Condition on one more observation, reusing the existing Gram block."""
        data = self.data.append(x, y)
        n = len(self.data)
        K = np.empty((n + 1, n + 1))
        K[:n, :n] = self.gram
        if n:
            row = cross_covariance(self.params, data.points[n:], self.data.points)[0]
            K[n, :n] = row
            K[:n, n] = row
        K[n, n] = self.params.variance
        return _from_gram(self.params, data, K)

    def _query(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: model has D={self.dim}, query has D={X.shape[1]}")
        return X


def _chol_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    return solve_triangular(L.T, solve_triangular(L, b, lower=True), lower=False)


def _weights(K: np.ndarray, L: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``K^{-1} y`` using the jittered factor ``L`` as a preconditioner.

    A plain solve with ``L`` returns ``(K + jitter I)^{-1} y``, whose mean misses
    the data by ``jitter * |alpha|``. A few refinement steps against the
    unjittered ``K`` restore noiseless interpolation; a step is kept only if
    it shrinks the residual.
    """
    alpha = _chol_solve(L, y)
    resid = y - K @ alpha
    norm = np.linalg.norm(resid)
    for _ in range(REFINE_STEPS):
        trial = alpha + _chol_solve(L, resid)
        trial_resid = y - K @ trial
        trial_norm = np.linalg.norm(trial_resid)
        if not trial_norm < norm:
            break
        alpha, resid, norm = trial, trial_resid, trial_norm
    return alpha


def _from_gram(params: MaternParams, data: ObservationSet, K: np.ndarray) -> GPModel:
    L, jitter = _cholesky(K, params.variance, data.points)
    alpha = _weights(K, L, data.values) if len(data) else np.zeros(0)
    return GPModel(params=params, data=data, chol=L, jitter=jitter, gram=K, alpha=alpha)


def fit(params: MaternParams, data: ObservationSet) -> GPModel:
    """Factorise the Gram matrix of ``data``; empty data gives the prior model."""
    return _from_gram(params, data, gram(params, data.points))


def predict(model: GPModel, x) -> tuple[float, float]:
    """Mean and standard deviation at a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("predict expects a single point; use GPModel.predict for batches")
    mean, std = model.predict(x)
    return float(mean[0]), float(std[0])


def ucb(model: GPModel, x, conf: ConfidenceParams):
    mean, std = model.predict(x)
    out = mean + math.sqrt(conf.beta) * std
    return float(out[0]) if np.ndim(x) == 1 else out


def lcb(model: GPModel, x, conf: ConfidenceParams):
    mean, std = model.predict(x)
    out = mean - math.sqrt(conf.beta) * std
    return float(out[0]) if np.ndim(x) == 1 else out


def _lml_from_model(model: GPModel) -> float:
    y = model.data.values
    n = len(y)
    return float(-0.5 * y @ model.alpha - np.sum(np.log(np.diag(model.chol))) - 0.5 * n * LOG_2PI)


def log_marginal_likelihood(params: MaternParams, data: ObservationSet) -> float:
    """Log evidence ``-y'K^-1 y/2 - log|K|/2 - n log(2 pi)/2``.

    The quadratic term uses the refined noiseless weights; the determinant
    comes from the jittered factor.
    """
    if len(data) == 0:
        raise ValueError("log marginal likelihood needs at least one observation")
    return _lml_from_model(fit(params, data))


def fit_hyperparameters(data: ObservationSet, nu: float, grid) -> MaternParams:
    """Grid-search maximum-likelihood ``(lengthscale, variance)``.

    Ties go to the earliest grid entry. Entries whose Gram matrix cannot be
    factorised are skipped.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("hyperparameter grid is empty")
    if len(data) == 0:
        raise ValueError("cannot fit on empty data")
    r = distances(data.points, data.points)
    corr_cache: dict[float, np.ndarray] = {}
    best, best_lml = None, -math.inf
    for lengthscale, variance in grid:
        params = MaternParams(nu, float(lengthscale), float(variance))
        if params.lengthscale not in corr_cache:
            C = correlation(nu, r / params.lengthscale)
            np.fill_diagonal(C, 1.0)
            corr_cache[params.lengthscale] = C
        try:
            model = _from_gram(params, data, params.variance * corr_cache[params.lengthscale])
        except IllConditionedGramError:
            continue
        lml = _lml_from_model(model)
        if lml > best_lml:
            best, best_lml = params, lml
    if best is None:
        raise IllConditionedGramError("Cholesky failed for every hyperparameter grid entry")
    return best


def default_grid(values, dim: int) -> list[tuple[float, float]]:
    """Log-spaced lengthscales times the unit-cube diameter, variances scaled to the data."""
    var = float(np.var(values)) if len(values) > 1 else 0.0
    if not var > 0:
        var = 1.0
    lengthscales = np.logspace(-2.0, 0.5, 13) * math.sqrt(dim)
    return [(float(ls), float(s * var)) for ls in lengthscales for s in (0.25, 1.0, 4.0)]
