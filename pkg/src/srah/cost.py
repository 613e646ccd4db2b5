"""Semantic risk field and traversal cost.

Penalties are held as integer tenths (0, 8, 20) so path costs can be summed
and compared exactly; the float views are the literals 0.0, 0.8 and 2.0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ContractViolation
from .grid import Coord, Grid, blocked_adjacency8

BOTTLENECK_TENTHS = 20  # A(s) >= 3
MODERATE_TENTHS = 8  # A(s) == 2
_PHI_VALUES = {0: 0.0, MODERATE_TENTHS: 0.8, BOTTLENECK_TENTHS: 2.0}


def phi_tenths_for(adjacency: int) -> int:
    if adjacency >= 3:
        return BOTTLENECK_TENTHS
    if adjacency == 2:
        return MODERATE_TENTHS
    return 0


@dataclass(frozen=True)
class CostField:
    n: int
    tenths: tuple[int, ...]

    def phi(self, c: Coord) -> float:
        return _PHI_VALUES[self.tenths[c[0] * self.n + c[1]]]

    def values(self) -> list[float]:
        return [_PHI_VALUES[t] for t in self.tenths]

    @classmethod
    def zeros(cls, n: int) -> CostField:
        return cls(n=n, tenths=(0,) * (n * n))


def compute_cost_field(grid: Grid) -> CostField:
    """Risk penalty for every cell, blocked cells included."""
    n, blocked = grid.n, grid.blocked
    # adjacency counts via one pass that spreads each obstacle to its neighbours
    counts = [0] * (n * n)
    for idx, b in enumerate(blocked):
        if not b:
            continue
        r, c = divmod(idx, n)
        for rr in range(max(r - 1, 0), min(r + 2, n)):
            base = rr * n
            for cc in range(max(c - 1, 0), min(c + 2, n)):
                if rr != r or cc != c:
                    counts[base + cc] += 1
    return CostField(n=n, tenths=tuple(phi_tenths_for(a) for a in counts))


def compute_cost_field_naive(grid: Grid) -> CostField:
    """Per-cell recomputation through ``blocked_adjacency8``; used as a cross-check."""
    return CostField(
        n=grid.n,
        tenths=tuple(phi_tenths_for(blocked_adjacency8(grid, c)) for c in grid.cells()),
    )


def step_cost_tenths(field: CostField, dest: Coord) -> int:
    return 10 + field.tenths[dest[0] * field.n + dest[1]]


def step_cost(field: CostField, dest: Coord) -> float:
    """Cost of entering ``dest``: 1 + phi(dest), whatever the source cell."""
    if not (0 <= dest[0] < field.n and 0 <= dest[1] < field.n):
        raise ContractViolation(f"{tuple(dest)} outside {field.n}x{field.n} field")
    return step_cost_tenths(field, dest) / 10
