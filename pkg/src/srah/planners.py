"""Grid search over 4-connected cells: weighted A*, BFS, greedy best-first, Dijkstra.

All costs are integer tenths. Open lists order by (priority, h, insertion
sequence), and successors are generated up, down, left, right, so every
planner is fully deterministic.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .cost import CostField, step_cost_tenths
from .errors import ContractViolation
from .grid import MOVES4, Coord, Grid, manhattan


@dataclass(frozen=True)
class Path:
    cells: tuple[Coord, ...]

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def steps(self) -> int:
        return len(self.cells) - 1


@dataclass(frozen=True)
class PlanOutcome:
    path: Path | None
    nodes_expanded: int
    elapsed_ns: int
    # cost of the returned path under the planner's own edge costs
    cost_tenths: int | None = None

    @property
    def found(self) -> bool:
        return self.path is not None

    @property
    def elapsed_ms(self) -> float:
        return self.elapsed_ns / 1e6


def _check_endpoints(grid: Grid, start: Coord, goal: Coord) -> tuple[Coord, Coord]:
    start, goal = Coord(*start), Coord(*goal)
    for name, c in (("start", start), ("goal", goal)):
        if not grid.in_bounds(c):
            raise ContractViolation(f"{name} {tuple(c)} outside {grid.n}x{grid.n} grid")
        if grid.blocked[c.row * grid.n + c.col]:
            raise ContractViolation(f"{name} {tuple(c)} is blocked")
    return start, goal


def _successors(n: int, blocked: list[bool], idx: int) -> list[int]:
    r, c = divmod(idx, n)
    out = []
    for dr, dc in MOVES4:
        rr, cc = r + dr, c + dc
        if 0 <= rr < n and 0 <= cc < n:
            j = rr * n + cc
            if not blocked[j]:
                out.append(j)
    return out


def _unwind(parent: dict[int, int], goal: int, n: int) -> Path:
    cells = [goal]
    while cells[-1] in parent:
        cells.append(parent[cells[-1]])
    cells.reverse()
    return Path(tuple(Coord(*divmod(i, n)) for i in cells))


def _best_first(
    grid: Grid,
    start: Coord,
    goal: Coord,
    edge: Callable[[int], int] | None,
    h_weight: Fraction | None,
) -> tuple[Path | None, int, int | None]:
    """Shared best-first loop.

    ``edge(j)`` gives the tenths cost of entering cell j; ``None`` drops the
    g term (greedy). ``h_weight`` scales the Manhattan heuristic; ``None``
    disables it (Dijkstra). Nodes are closed on first expansion and never
    reopened.
    """
    n, blocked = grid.n, grid.blocked
    s = start.row * n + start.col
    t = goal.row * n + goal.col
    gr, gc = goal

    if h_weight is None:
        num, den = 0, 1
    else:
        num, den = h_weight.numerator, h_weight.denominator

    def h_steps(j: int) -> int:
        r, c = divmod(j, n)
        return abs(r - gr) + abs(c - gc)

    # priority scaled by den so weighted keys stay integral: den*g + num*10*h
    g = {s: 0}
    parent: dict[int, int] = {}
    closed: set[int] = set()
    seq = 0
    h0 = h_steps(s)
    open_list = [(num * 10 * h0 if edge is not None else h0, h0, seq, s)]
    expanded = 0

    while open_list:
        _, _, _, u = heapq.heappop(open_list)
        if u in closed:
            continue
        closed.add(u)
        expanded += 1
        if u == t:
            return _unwind(parent, t, n), expanded, g[u]
        gu = g[u]
        for v in _successors(n, blocked, u):
            if v in closed:
                continue
            if edge is None:
                # greedy: first discovery fixes the parent
                if v in g:
                    continue
                gv = gu + 10
                g[v] = gv
                parent[v] = u
                hv = h_steps(v)
                seq += 1
                heapq.heappush(open_list, (hv, hv, seq, v))
                continue
            gv = gu + edge(v)
            if gv < g.get(v, gv + 1):
                g[v] = gv
                parent[v] = u
                hv = h_steps(v)
                seq += 1
                heapq.heappush(open_list, (den * gv + num * 10 * hv, hv, seq, v))
    return None, expanded, None


def astar_weighted(
    grid: Grid,
    field: CostField,
    start: Coord,
    goal: Coord,
    w: float = 1.2,
) -> PlanOutcome:
    """Weighted A* with f = g + w * manhattan and edge cost 1 + phi(dest).

    Returned path cost is at most ``w`` times the optimum.
    """
    if w < 1:
        raise ContractViolation(f"heuristic weight must be >= 1, got {w}")
    start, goal = _check_endpoints(grid, start, goal)
    weight = Fraction(str(w))
    tenths = field.tenths
    t0 = time.perf_counter_ns()
    path, expanded, cost = _best_first(grid, start, goal, lambda j: 10 + tenths[j], weight)
    elapsed = time.perf_counter_ns() - t0
    return PlanOutcome(path, expanded, elapsed, cost)


def bfs_shortest(grid: Grid, start: Coord, goal: Coord) -> PlanOutcome:
    """Fewest-steps path; risk is ignored."""
    start, goal = _check_endpoints(grid, start, goal)
    n, blocked = grid.n, grid.blocked
    t0 = time.perf_counter_ns()
    s = start.row * n + start.col
    t = goal.row * n + goal.col
    parent: dict[int, int] = {}
    seen = {s}
    queue = deque([s])
    expanded = 0
    path = None
    while queue:
        u = queue.popleft()
        expanded += 1
        if u == t:
            path = _unwind(parent, t, n)
            break
        for v in _successors(n, blocked, u):
            if v not in seen:
                seen.add(v)
                parent[v] = u
                queue.append(v)
    elapsed = time.perf_counter_ns() - t0
    cost = None if path is None else path.steps * 10
    return PlanOutcome(path, expanded, elapsed, cost)


def greedy_best_first(grid: Grid, start: Coord, goal: Coord) -> PlanOutcome:
    """Best-first on Manhattan distance alone, with a closed set so it always terminates."""
    start, goal = _check_endpoints(grid, start, goal)
    t0 = time.perf_counter_ns()
    path, expanded, _ = _best_first(grid, start, goal, None, Fraction(1))
    elapsed = time.perf_counter_ns() - t0
    cost = None if path is None else path.steps * 10
    return PlanOutcome(path, expanded, elapsed, cost)


def dijkstra_oracle(
    grid: Grid,
    field: CostField | None,
    start: Coord,
    goal: Coord,
) -> PlanOutcome:
    """Exact minimum-cost path; unit edge costs when ``field`` is None."""
    start, goal = _check_endpoints(grid, start, goal)
    if field is None:
        edge = lambda j: 10  # noqa: E731
    else:
        tenths = field.tenths
        edge = lambda j: 10 + tenths[j]  # noqa: E731
    t0 = time.perf_counter_ns()
    path, expanded, cost = _best_first(grid, start, goal, edge, None)
    elapsed = time.perf_counter_ns() - t0
    return PlanOutcome(path, expanded, elapsed, cost)


def path_cost_tenths(cells: Sequence[Coord], field: CostField | None = None) -> int:
    """Cost of a cell sequence in tenths (unit cost when ``field`` is None)."""
    if field is None:
        return 10 * (len(cells) - 1)
    return sum(step_cost_tenths(field, c) for c in cells[1:])


def path_problems(grid: Grid, cells: Sequence[Coord], start: Coord, goal: Coord) -> list[str]:
    """Every way ``cells`` fails to be a valid path on ``grid``; empty when valid."""
    problems = []
    if not cells:
        return ["empty path"]
    if tuple(cells[0]) != tuple(start):
        problems.append(f"path starts at {tuple(cells[0])}, expected {tuple(start)}")
    if tuple(cells[-1]) != tuple(goal):
        problems.append(f"path ends at {tuple(cells[-1])}, expected {tuple(goal)}")
    for i, c in enumerate(cells):
        if not grid.in_bounds(c):
            problems.append(f"cell {i} {tuple(c)} out of bounds")
        elif grid.blocked[c[0] * grid.n + c[1]]:
            problems.append(f"cell {i} {tuple(c)} is blocked")
        if i and manhattan(cells[i - 1], c) != 1:
            problems.append(f"cells {i - 1} and {i} are not 4-adjacent")
    return problems


def validate_path(grid: Grid, cells: Sequence[Coord], start: Coord, goal: Coord) -> None:
    problems = path_problems(grid, cells, start, goal)
    if problems:
        raise ContractViolation("invalid path: " + "; ".join(problems))
