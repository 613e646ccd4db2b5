"""Grid world: occupancy, seeded obstacle sampling, adjacency queries, ASCII render."""

from __future__ import annotations

import copy as _copy
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, NamedTuple, Sequence

from .errors import ConfigurationError, ContractViolation
from .rng import SeedStream

if TYPE_CHECKING:
    from .cost import CostField


class Coord(NamedTuple):
    row: int
    col: int


# movement order: up, down, left, right
MOVES4 = ((-1, 0), (1, 0), (0, -1), (0, 1))
# 8-neighbourhood offsets, row-major
OFFSETS8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


@dataclass
class Grid:
    """An n x n occupancy grid with fixed start and goal cells.

    ``blocked`` is a flat row-major list of ``n * n`` booleans. Cells blocked
    after sampling (dynamic obstacles) are additionally tracked in ``dynamic``
    so renders can tell them apart from static ones.
    """

    n: int
    blocked: list[bool]
    start: Coord
    goal: Coord
    static_count: int
    dynamic: set[Coord] = field(default_factory=set)

    def __post_init__(self) -> None:
        if len(self.blocked) != self.n * self.n:
            raise ContractViolation(
                f"blocked has {len(self.blocked)} entries, expected {self.n * self.n}"
            )
        self.start = Coord(*self.start)
        self.goal = Coord(*self.goal)
        for name, c in (("start", self.start), ("goal", self.goal)):
            self._check(c)
            if self.blocked[c.row * self.n + c.col]:
                raise ContractViolation(f"{name} cell {tuple(c)} is blocked")
        if self.start == self.goal:
            raise ContractViolation("start and goal must differ")

    @classmethod
    def from_rows(cls, rows: Sequence[str], start=None, goal=None) -> Grid:
        """Build a grid from strings where ``#`` marks a blocked cell.

        Start and goal default to the top-left and bottom-right corners.
        """
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ConfigurationError("rows must form a square")
        blocked = [ch == "#" for r in rows for ch in r]
        return cls(
            n=n,
            blocked=blocked,
            start=Coord(*(start or (0, 0))),
            goal=Coord(*(goal or (n - 1, n - 1))),
            static_count=sum(blocked),
        )

    def _check(self, c: Coord) -> None:
        if not (0 <= c[0] < self.n and 0 <= c[1] < self.n):
            raise ContractViolation(f"coordinate {tuple(c)} outside {self.n}x{self.n} grid")

    def in_bounds(self, c: Coord) -> bool:
        return 0 <= c[0] < self.n and 0 <= c[1] < self.n

    @property
    def blocked_count(self) -> int:
        return sum(self.blocked)

    def copy(self) -> Grid:
        # shallow copy skips __post_init__: a mid-trial grid may have its start blocked
        new = _copy.copy(self)
        new.blocked = list(self.blocked)
        new.dynamic = set(self.dynamic)
        return new

    def cells(self) -> Iterable[Coord]:
        n = self.n
        return (Coord(r, c) for r in range(n) for c in range(n))


def obstacle_count(n: int, rho: float) -> int:
    """round(rho * n^2), halves rounded up."""
    return int(math.floor(rho * n * n + 0.5))


def sample_grid(n: int, rho: float, seed: int) -> Grid:
    """Sample an n x n grid with exactly ``obstacle_count(n, rho)`` static obstacles.

    Obstacles are drawn uniformly without replacement (partial Fisher-Yates
    over the row-major cell list) from every cell except the start (0, 0) and
    goal (n-1, n-1). Connectivity is not enforced.
    """
    if n < 2:
        raise ConfigurationError(f"n must be >= 2, got {n}")
    if not (0.0 <= rho <= 1.0):
        raise ConfigurationError(f"rho must lie in [0, 1], got {rho}")
    k = obstacle_count(n, rho)
    if k > n * n - 2:
        raise ConfigurationError(f"rho={rho} leaves no room for start and goal on {n}x{n}")

    last = n * n - 1
    pool = list(range(1, last))
    rng = SeedStream(seed)
    m = len(pool)
    for i in range(k):
        j = i + rng.randbelow(m - i)
        pool[i], pool[j] = pool[j], pool[i]

    blocked = [False] * (n * n)
    for idx in pool[:k]:
        blocked[idx] = True
    return Grid(n=n, blocked=blocked, start=Coord(0, 0), goal=Coord(n - 1, n - 1), static_count=k)


def is_free(grid: Grid, c: Coord) -> bool:
    grid._check(c)
    return not grid.blocked[c[0] * grid.n + c[1]]


def neighbors4(grid: Grid, c: Coord) -> list[Coord]:
    """Free in-bounds orthogonal neighbours, ordered up, down, left, right."""
    grid._check(c)
    n, blocked = grid.n, grid.blocked
    r, col = c
    out = []
    for dr, dc in MOVES4:
        rr, cc = r + dr, col + dc
        if 0 <= rr < n and 0 <= cc < n and not blocked[rr * n + cc]:
            out.append(Coord(rr, cc))
    return out


def blocked_adjacency8(grid: Grid, c: Coord) -> int:
    """Number of blocked cells among the in-bounds 8-neighbours of ``c``.

    Positions beyond the border are not cells and are not counted.
    """
    grid._check(c)
    n, blocked = grid.n, grid.blocked
    r, col = c
    count = 0
    for rr in range(max(r - 1, 0), min(r + 2, n)):
        base = rr * n
        for cc in range(max(col - 1, 0), min(col + 2, n)):
            if (rr != r or cc != col) and blocked[base + cc]:
                count += 1
    return count


def manhattan(a: Coord, b: Coord) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def set_blocked(grid: Grid, c: Coord, *, dynamic: bool = True) -> Grid:
    """Block ``c`` in place and return the grid. Idempotent.

    The caller must not block the agent's current cell; blocking the goal
    raises.
    """
    c = Coord(*c)
    grid._check(c)
    if c == grid.goal:
        raise ContractViolation(f"cannot block the goal cell {tuple(c)}")
    idx = c.row * grid.n + c.col
    if not grid.blocked[idx]:
        grid.blocked[idx] = True
        if dynamic:
            grid.dynamic.add(c)
        else:
            grid.static_count += 1
    return grid


def render_ascii(
    grid: Grid,
    path: Sequence[Coord] | None = None,
    risk: CostField | None = None,
) -> str:
    """Render the grid as text, row 0 first.

    Glyphs: ``.`` free, ``#`` static obstacle, ``D`` dynamic obstacle,
    ``S`` start, ``G`` goal, ``*`` path cell, ``o`` free cell with positive
    risk that is not on the path.
    """
    n = grid.n
    on_path: set[Coord] = set()
    for c in path or ():
        c = Coord(*c)
        grid._check(c)
        on_path.add(c)

    lines = []
    for r in range(n):
        row = []
        for col in range(n):
            c = Coord(r, col)
            if c == grid.start:
                ch = "S"
            elif c == grid.goal:
                ch = "G"
            elif c in on_path:
                ch = "*"
            elif grid.blocked[r * n + col]:
                ch = "D" if c in grid.dynamic else "#"
            elif risk is not None and risk.tenths[r * n + col] > 0:
                ch = "o"
            else:
                ch = "."
            row.append(ch)
        lines.append("".join(row))
    return "\n".join(lines)
