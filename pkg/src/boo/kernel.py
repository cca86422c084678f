"""Matérn covariance functions.

The kernel is parameterised on the raw scaled distance ``z = r / lambda``::

    k(r) = sigma^2 / (Gamma(nu) 2^(nu-1)) * z^nu * K_nu(z)

Half-integer orders ``nu = p + 1/2`` use the exact polynomial-times-exponential
form; integer orders go through :func:`boo.bessel.bessel_k`. Any other ``nu``
is rejected.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from boo.bessel import bessel_k


class UnsupportedSmoothnessError(ValueError):
    """Raised for a Matérn smoothness that is neither integer nor half-integer."""


def default_nu(dim: int) -> float:
    """Smoothness used by the experiments: ``4 + (D + 1) / 2``."""
    return 4.0 + (dim + 1) / 2.0


def _check_nu(nu: float) -> None:
    twice = 2.0 * nu
    if twice != math.floor(twice):
        raise UnsupportedSmoothnessError(
            f"unsupported smoothness nu={nu!r}: only integer and half-integer values are implemented"
        )


@dataclass(frozen=True)
class MaternParams:
    nu: float
    lengthscale: float = 1.0
    variance: float = 1.0

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError(f"nu must be > 0, got {self.nu}")
        if not self.lengthscale > 0:
            raise ValueError(f"lengthscale must be > 0, got {self.lengthscale}")
        if not self.variance > 0:
            raise ValueError(f"variance must be > 0, got {self.variance}")
        _check_nu(self.nu)

    def check_theory(self, dim: int) -> bool:
        """Warn (never raise) when ``nu <= 4 + D/2``; returns whether the bound holds."""
        ok = self.nu > 4.0 + dim / 2.0
        if not ok:
            warnings.warn(
                f"nu={self.nu} does not satisfy nu > 4 + D/2 = {4.0 + dim / 2.0}",
                stacklevel=2,
            )
        return ok


_Z_TINY = 1e-8


def _half_integer_coefficients(p: int) -> np.ndarray:
    # Coefficients c_j of z^j in p!/(2p)! * sum_i (p+i)!/(i!(p-i)!) (2z)^(p-i).
    scale = math.factorial(p) / math.factorial(2 * p)
    coef = np.zeros(p + 1)
    for i in range(p + 1):
        j = p - i
        coef[j] = scale * math.factorial(p + i) / (math.factorial(i) * math.factorial(p - i)) * 2.0**j
    return coef


def matern_closed_form(nu: float, z) -> np.ndarray:
    """Unit-variance half-integer Matérn correlation at scaled distance ``z``."""
    p = nu - 0.5
    if p < 0 or p != math.floor(p):
        raise UnsupportedSmoothnessError(f"closed form needs half-integer nu, got {nu!r}")
    z = np.asarray(z, dtype=float)
    poly = np.polynomial.polynomial.polyval(z, _half_integer_coefficients(int(p)))
    with np.errstate(under="ignore"):
        return poly * np.exp(-z)


def matern_bessel(nu: float, z) -> np.ndarray:
    """Unit-variance Matérn correlation via the Bessel formula (``z > 0``)."""
    _check_nu(nu)
    z = np.asarray(z, dtype=float)
    log_norm = (1.0 - nu) * math.log(2.0) - math.lgamma(nu)
    kv = bessel_k(nu, z)
    with np.errstate(divide="ignore", under="ignore"):
        out = np.exp(log_norm + nu * np.log(z) + np.log(kv))
    return np.where(kv > 0, out, 0.0)


def correlation(nu: float, z) -> np.ndarray:
    """Unit-variance Matérn correlation for ``z >= 0`` with the ``z = 0`` limit set to 1."""
    _check_nu(nu)
    z = np.asarray(z, dtype=float)
    out = np.ones_like(z)
    pos = z > 0
    if pos.any():
        if nu != math.floor(nu):
            out[pos] = matern_closed_form(nu, z[pos])
        else:
            # K_nu overflows long before z^nu K_nu does; below _Z_TINY the
            # correlation is 1 to within 1e-14 for integer nu >= 1.
            zp = z[pos]
            out[pos] = np.where(zp < _Z_TINY, 1.0, matern_bessel(nu, np.maximum(zp, _Z_TINY)))
    return out


def _as_points(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a list of points, got shape {X.shape}")
    return X


def distances(X, Y) -> np.ndarray:
    """Euclidean distance matrix; entry (i, j) is bit-identical to entry (j, i) of the swap."""
    X = _as_points(X)
    Y = _as_points(Y)
    if X.shape[1] != Y.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Y.shape[1]}")
    diff = X[:, None, :] - Y[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def matern(params: MaternParams, x, x_prime) -> float:
    """Covariance between two points."""
    x = np.asarray(x, dtype=float).ravel()
    x_prime = np.asarray(x_prime, dtype=float).ravel()
    if x.shape != x_prime.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {x_prime.size}")
    r = float(distances(x, x_prime)[0, 0])
    if r == 0.0:
        return params.variance
    return params.variance * float(correlation(params.nu, np.array([r / params.lengthscale]))[0])


def cross_covariance(params: MaternParams, X, Y) -> np.ndarray:
    """Matrix of ``k(x_i, y_j)``."""
    r = distances(X, Y)
    return params.variance * correlation(params.nu, r / params.lengthscale)


def gram(params: MaternParams, X) -> np.ndarray:
    """Gram matrix ``K[i, j] = k(x_i, x_j)``; empty input gives a 0x0 matrix."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.zeros((0, 0))
    X = _as_points(X)
    K = cross_covariance(params, X, X)
    # distances are exactly symmetric already; this pins the diagonal too
    np.fill_diagonal(K, params.variance)
    return K
