"""Synthetic objectives, all written for maximisation.

The Hartmann, Shekel and Schwefel constants follow the standard published
definitions (Dixon & Szegő 1978 for Hartmann-3 and Shekel-10; Schwefel 1981).
The minimisation forms are negated. Reference optima were located by bounded
quasi-Newton refinement from the published minimisers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Objective:
    """A box-constrained black-box function to maximise."""

    name: str
    fn: Callable[[np.ndarray], float] = field(repr=False)
    lower: np.ndarray
    upper: np.ndarray
    f_star: float | None = None
    x_star: np.ndarray | None = None
    note: str = ""

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if not np.all(lower < upper):
            raise ValueError("domain must satisfy lower < upper in every dimension")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.x_star is not None:
            object.__setattr__(self, "x_star", np.asarray(self.x_star, dtype=float))

    @property
    def dim(self) -> int:
        return self.lower.size

    def __call__(self, x) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))

    def to_unit(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def from_unit(self, u) -> np.ndarray:
        return self.lower + np.asarray(u, dtype=float) * (self.upper - self.lower)


BenchmarkSpec = Objective


_HARTMANN3_ALPHA = np.array([1.0, 1.2, 3.0, 3.2])
_HARTMANN3_A = np.array([
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
    [3.0, 10.0, 30.0],
    [0.1, 10.0, 35.0],
])
_HARTMANN3_P = 1e-4 * np.array([
    [3689, 1170, 2673],
    [4699, 4387, 7470],
    [1091, 8732, 5547],
    [381, 5743, 8828],
])


def _hartmann3(x: np.ndarray) -> float:
    inner = np.sum(_HARTMANN3_A * (x - _HARTMANN3_P) ** 2, axis=1)
    return float(_HARTMANN3_ALPHA @ np.exp(-inner))


def hartmann3() -> Objective:
    return Objective(
        "hartmann3", _hartmann3, np.zeros(3), np.ones(3),
        f_star=3.862779787332659,
        x_star=np.array([0.11458888826480075, 0.5556488893903354, 0.8525469795464348]),
        note="Hartmann-3, negated; optimum refined from (0.114614, 0.555649, 0.852547)",
    )


_SHEKEL_C = np.array([
    [4.0, 4.0, 4.0, 4.0],
    [1.0, 1.0, 1.0, 1.0],
    [8.0, 8.0, 8.0, 8.0],
    [6.0, 6.0, 6.0, 6.0],
    [3.0, 7.0, 3.0, 7.0],
    [2.0, 9.0, 2.0, 9.0],
    [5.0, 5.0, 3.0, 3.0],
    [8.0, 1.0, 8.0, 1.0],
    [6.0, 2.0, 6.0, 2.0],
    [7.0, 3.6, 7.0, 3.6],
])
_SHEKEL_BETA = 0.1 * np.array([1, 2, 2, 4, 4, 6, 3, 7, 5, 5])


def _shekel4_10(x: np.ndarray) -> float:
    return float(np.sum(1.0 / (np.sum((x - _SHEKEL_C) ** 2, axis=1) + _SHEKEL_BETA)))


def shekel4_10() -> Objective:
    return Objective(
        "shekel4_10", _shekel4_10, np.zeros(4), np.full(4, 10.0),
        f_star=10.53640981669203,
        x_star=np.array([4.000746526584735, 4.000592928739196, 3.9996633941646875, 3.999509795621352]),
        note="Shekel m=10, negated; optimum refined from (4, 4, 4, 4)",
    )


_SCHWEFEL_SHIFT = 418.9829
_SCHWEFEL_XOPT = 420.96874878568275
_SCHWEFEL_TERM_MAX = 418.98288727243295


def _schwefel(x: np.ndarray) -> float:
    return float(np.sum(x * np.sin(np.sqrt(np.abs(x)))) - _SCHWEFEL_SHIFT * x.size)


def schwefel(dim: int = 3) -> Objective:
    return Objective(
        f"schwefel{dim}", _schwefel, np.full(dim, -500.0), np.full(dim, 500.0),
        f_star=dim * (_SCHWEFEL_TERM_MAX - _SCHWEFEL_SHIFT),
        x_star=np.full(dim, _SCHWEFEL_XOPT),
        note="Schwefel, negated; separable, per-coordinate optimum refined on [400, 440]",
    )


def quadratic(dim: int, x0) -> Objective:
    """``f(x) = -||x - x0||^2`` on the unit cube, maximised at ``x0``."""
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.size != dim:
        raise ValueError(f"x0 has {x0.size} entries, expected {dim}")
    if np.any(x0 < 0) or np.any(x0 > 1):
        raise ValueError("x0 must lie inside [0, 1]^D")

    def fn(x):
        return -float(np.sum((x - x0) ** 2))

    return Objective(f"quadratic{dim}d", fn, np.zeros(dim), np.ones(dim), f_star=0.0, x_star=x0.copy(),
                     note="smooth unimodal sanity target")


REGISTRY: dict[str, Callable[[], Objective]] = {
    "hartmann3": hartmann3,
    "shekel4_10": shekel4_10,
    "schwefel3": lambda: schwefel(3),
    "quadratic1d": lambda: quadratic(1, [0.33]),
    "quadratic2d": lambda: quadratic(2, [0.33, 0.77]),
}


def lookup(name: str) -> Objective:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown function {name!r}; available: {', '.join(sorted(REGISTRY))}") from None


def list_functions() -> list[str]:
    return sorted(REGISTRY)
