"""Modified Bessel functions of the second kind for integer and half-integer order.

Only the two order families needed by the Matérn kernel are covered:

* integer order ``n``: K0 and K1 from :mod:`scipy.special`, then upward
  recurrence;
* half-integer order ``n + 1/2``: the elementary K_{1/2} and K_{3/2}, then
  upward recurrence.

Upward recurrence ``K_{v+1}(z) = K_{v-1}(z) + (2v/z) K_v(z)`` is stable for K
because the function grows with order.
"""

from __future__ import annotations

import numpy as np
from scipy import special


def bessel_k01(z) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(K0(z), K1(z))`` for ``z > 0`` (array input)."""
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ValueError("modified Bessel K requires z > 0")
    return special.k0(z), special.k1(z)


def _recur(k_lo: np.ndarray, k_hi: np.ndarray, order_hi: float, target: float, z):
    # k_lo = K_{order_hi - 1}, k_hi = K_{order_hi}
    order = order_hi
    while order < target:
        k_lo, k_hi = k_hi, k_lo + (2.0 * order / z) * k_hi
        order += 1.0
    return k_hi


def bessel_k(order: float, z) -> np.ndarray:
    """Modified Bessel function of the second kind ``K_order(z)``.

    Parameters
    ----------
    order : float
        Nonnegative integer or half-integer order.
    z : array_like
        Strictly positive arguments.

    Raises
    ------
    ValueError
        If ``order`` is neither an integer nor a half-integer, or ``z <= 0``.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise ValueError("modified Bessel K requires z > 0")
    twice = 2.0 * order
    if order < 0 or twice != np.floor(twice):
        raise ValueError(f"unsupported Bessel order {order!r}")
    if order == np.floor(order):
        k0, k1 = bessel_k01(z)
        if order == 0:
            return k0
        return _recur(k0, k1, 1.0, order, z)
    with np.errstate(under="ignore"):
        k_half = np.sqrt(np.pi / (2.0 * z)) * np.exp(-z)
    if order == 0.5:
        return k_half
    k_3half = k_half * (1.0 + 1.0 / z)
    return _recur(k_half, k_3half, 1.5, order, z)
