"""Hierarchical partition of the unit cube into axis-aligned cells.

A scheme ``P(m; a, b)`` splits each of a cell's ``b`` longest sides into ``a``
equal parts, giving ``m = a**b`` children. The tree keeps explicit bounds for
every cell so that odd ``a`` stays exact enough, and child centers are placed
by offset from the parent center so that the middle child of an odd split
shares its parent's center bit-for-bit.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class PartitionScheme:
    a: int
    b: int

    def __post_init__(self):
        if int(self.a) != self.a or self.a < 2:
            raise ValueError(f"a must be an integer >= 2, got {self.a}")
        if int(self.b) != self.b or self.b < 1:
            raise ValueError(f"b must be an integer >= 1, got {self.b}")

    @property
    def m(self) -> int:
        return self.a**self.b

    def validate(self, dim: int) -> "PartitionScheme":
        if self.b > dim:
            raise ValueError(f"b={self.b} exceeds the dimension D={dim}")
        return self

    @classmethod
    def auto(cls, budget: int, dim: int) -> "PartitionScheme":
        """``b = D`` and ``a = max(2, floor((sqrt(N)/2)**(1/D)))``."""
        if budget < 1 or dim < 1:
            raise ValueError("budget and dimension must be >= 1")
        a = math.floor((math.sqrt(budget) / 2.0) ** (1.0 / dim) + 1e-12)
        return cls(max(2, a), dim)

    @classmethod
    def from_branching(cls, m: int, b: int) -> "PartitionScheme":
        """Scheme with ``a**b == m``; raises if ``m`` has no integer ``b``-th root."""
        a = round(m ** (1.0 / b))
        for cand in (a - 1, a, a + 1):
            if cand >= 2 and cand**b == m:
                return cls(cand, b)
        raise ValueError(f"m={m} has no integer {b}-th root; try m in {[k**b for k in range(2, 6)]}")

    def __str__(self) -> str:
        return f"P({self.m};{self.a},{self.b})"


@dataclass(frozen=True, eq=False)
class Cell:
    lower: np.ndarray
    upper: np.ndarray
    depth: int
    index: int
    center: np.ndarray

    @property
    def key(self) -> tuple[int, int]:
        return (self.depth, self.index)

    @property
    def sides(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x, strict: bool = False) -> bool:
        x = np.asarray(x)
        if strict:
            return bool(np.all(self.lower < x) and np.all(x < self.upper))
        return bool(np.all(self.lower <= x) and np.all(x <= self.upper))

    def half_diagonal(self) -> float:
        """``sup_{x in cell} ||x - center||``, attained at a corner."""
        far = np.maximum(self.upper - self.center, self.center - self.lower)
        return float(np.sqrt(np.sum(far**2)))


def _frozen(x) -> np.ndarray:
    x = np.array(x, dtype=float)
    x.flags.writeable = False
    return x


def root_cell(dim: int) -> Cell:
    return Cell(_frozen(np.zeros(dim)), _frozen(np.ones(dim)), 0, 0, _frozen(np.full(dim, 0.5)))


def split_dimensions(cell: Cell, b: int) -> list[int]:
    """The ``b`` longest dimensions (ties to the lowest index), in ascending order."""
    order = np.argsort(-cell.sides, kind="stable")
    return sorted(int(d) for d in order[:b])


def split(cell: Cell, scheme: PartitionScheme, first_index: int = 0) -> list[Cell]:
    """Children of ``cell`` under ``scheme``, indexed from ``first_index``.

    Children are ordered lexicographically over the per-dimension interval
    indices of the split dimensions (ascending dimension order).
    """
    a = scheme.a
    dims = split_dimensions(cell, scheme.b)
    edges, centers = {}, {}
    for d in dims:
        lo, hi, c = cell.lower[d], cell.upper[d], cell.center[d]
        width = (hi - lo) / a
        e = [lo + width * k for k in range(a + 1)]
        e[0], e[a] = lo, hi
        edges[d] = e
        centers[d] = [c + (k - (a - 1) / 2.0) * width for k in range(a)]
    children = []
    for n, combo in enumerate(itertools.product(range(a), repeat=len(dims))):
        lower = cell.lower.copy()
        upper = cell.upper.copy()
        center = cell.center.copy()
        for d, k in zip(dims, combo):
            lower[d] = edges[d][k]
            upper[d] = edges[d][k + 1]
            center[d] = centers[d][k]
        children.append(Cell(_frozen(lower), _frozen(upper), cell.depth + 1, first_index + n, _frozen(center)))
    return children


def side_length_bounds(scheme: PartitionScheme, h: int, dim: int) -> tuple[float, float]:
    """Upper bound on the longest and lower bound on the smallest side at depth ``h``."""
    q = scheme.b * h
    return float(scheme.a ** -(q // dim)), float(scheme.a ** -(-(-q // dim)))


def half_diagonal_bound(scheme: PartitionScheme, h: int, dim: int) -> float:
    return math.sqrt(dim) * side_length_bounds(scheme, h, dim)[0]


class Tree:
    """m-ary tree of cells over ``[0, 1]^D``.

    Leaves are kept per depth in ascending index order.
    """

    def __init__(self, dim: int):
        self.dim = dim
        root = root_cell(dim)
        self.nodes: dict[tuple[int, int], Cell] = {root.key: root}
        self.children: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self._leaves: dict[int, dict[int, Cell]] = {0: {0: root}}
        self._next_index: dict[int, int] = {0: 1}

    @property
    def root(self) -> Cell:
        return self.nodes[(0, 0)]

    @property
    def depth(self) -> int:
        return max(self._next_index)

    @property
    def min_leaf_depth(self) -> int:
        return min(h for h, level in self._leaves.items() if level)

    @property
    def n_leaves(self) -> int:
        return sum(len(v) for v in self._leaves.values())

    @property
    def n_expanded(self) -> int:
        return len(self.children)

    def is_leaf(self, key: tuple[int, int]) -> bool:
        return key[1] in self._leaves.get(key[0], {})

    def leaves_at_depth(self, h: int) -> list[Cell]:
        return list(self._leaves.get(h, {}).values())

    def leaves(self) -> Iterator[Cell]:
        for h in sorted(self._leaves):
            yield from self._leaves[h].values()

    def expand(self, key: tuple[int, int], scheme: PartitionScheme) -> list[Cell]:
        h, i = key
        if not self.is_leaf(key):
            raise RuntimeError(f"node {key} is not a leaf and cannot be expanded")
        cell = self._leaves[h].pop(i)
        start = self._next_index.get(h + 1, 0)
        kids = split(cell, scheme, start)
        self._next_index[h + 1] = start + len(kids)
        level = self._leaves.setdefault(h + 1, {})
        for kid in kids:
            self.nodes[kid.key] = kid
            level[kid.index] = kid
        self.children[key] = [kid.key for kid in kids]
        return kids

    def dump(self) -> str:
        """One JSON record per node, sorted by ``(depth, index)``."""
        lines = []
        for key in sorted(self.nodes):
            cell = self.nodes[key]
            lines.append(json.dumps({
                "depth": cell.depth,
                "index": cell.index,
                "lower": cell.lower.tolist(),
                "upper": cell.upper.tolist(),
                "center": cell.center.tolist(),
                "state": "leaf" if self.is_leaf(key) else "expanded",
            }))
        return "\n".join(lines) + "\n"
