"""Closed-loop trial execution with stochastic dynamic obstacles."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, replace
from typing import Callable, Protocol

from .cost import CostField, compute_cost_field
from .errors import ConfigurationError
from .grid import OFFSETS8, Coord, Grid, set_blocked
from .planners import PlanOutcome, astar_weighted, bfs_shortest, greedy_best_first


class UniformSource(Protocol):
    def random(self) -> float: ...


class PlannerKind(enum.Enum):
    # definition order is the canonical report order
    BFS_REPLAN = "BFS"
    GREEDY_FIXED = "Greedy"
    SRAH = "SRAH"

    @property
    def label(self) -> str:
        return self.value

    @property
    def order(self) -> int:
        return list(PlannerKind).index(self)

    @classmethod
    def parse(cls, text: str) -> PlannerKind:
        key = text.strip()
        for kind in cls:
            if key.upper() in (kind.name, kind.value.upper()):
                return kind
        raise ConfigurationError(f"unknown planner {text!r}")


class FailureReason(enum.Enum):
    NONE = "NONE"
    NO_INITIAL_PATH = "NO_INITIAL_PATH"
    BLOCKED_NO_RECOVERY = "BLOCKED_NO_RECOVERY"
    REPLAN_FAILED = "REPLAN_FAILED"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class DynamicsConfig:
    """Obstacles spawn in the agent's 8-neighbourhood and persist for the trial."""

    p_dyn: float = 0.06

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_dyn <= 1.0):
            raise ConfigurationError(f"p_dyn must lie in [0, 1], got {self.p_dyn}")


@dataclass(frozen=True)
class PlannerPolicy:
    kind: PlannerKind
    replans: bool
    uses_semantic_cost: bool
    w: float = 1.2

    def __post_init__(self) -> None:
        if self.kind is PlannerKind.GREEDY_FIXED and self.replans:
            raise ConfigurationError("the greedy baseline never replans")
        if self.w < 1:
            raise ConfigurationError(f"heuristic weight must be >= 1, got {self.w}")

    @classmethod
    def srah(cls, w: float = 1.2) -> PlannerPolicy:
        return cls(PlannerKind.SRAH, replans=True, uses_semantic_cost=True, w=w)

    @classmethod
    def bfs(cls) -> PlannerPolicy:
        return cls(PlannerKind.BFS_REPLAN, replans=True, uses_semantic_cost=False)

    @classmethod
    def greedy(cls) -> PlannerPolicy:
        return cls(PlannerKind.GREEDY_FIXED, replans=False, uses_semantic_cost=False)

    @classmethod
    def for_kind(cls, kind: PlannerKind, w: float = 1.2) -> PlannerPolicy:
        if kind is PlannerKind.SRAH:
            return cls.srah(w)
        if kind is PlannerKind.BFS_REPLAN:
            return cls.bfs()
        return cls.greedy()


def default_policies(w: float = 1.2) -> list[PlannerPolicy]:
    return [PlannerPolicy.for_kind(k, w) for k in PlannerKind]


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    planner: PlannerKind
    success: bool
    steps: int
    planning_time_ms: float
    replan_count: int
    failure_reason: FailureReason
    grid_seed: int = 0
    dynamics_seed: int = 0
    rho: float = 0.0
    p_dyn: float = 0.0

    def without_timing(self) -> TrialRecord:
        return replace(self, planning_time_ms=0.0)


def spawn_dynamic_obstacles(
    grid: Grid,
    agent: Coord,
    goal: Coord,
    cfg: DynamicsConfig,
    rng: UniformSource,
) -> list[Coord]:
    """Block each free 8-neighbour of ``agent`` (goal excluded) with probability p_dyn.

    Candidates are visited in row-major order and each consumes exactly one
    uniform draw, so RNG usage depends only on the grid state.
    """
    n, blocked = grid.n, grid.blocked
    ar, ac = agent
    spawned = []
    for dr, dc in OFFSETS8:
        r, c = ar + dr, ac + dc
        if not (0 <= r < n and 0 <= c < n) or blocked[r * n + c]:
            continue
        cell = Coord(r, c)
        if cell == goal:
            continue
        if rng.random() < cfg.p_dyn:
            set_blocked(grid, cell)
            spawned.append(cell)
    return spawned


PlanHook = Callable[[Grid, PlanOutcome, Coord], None]


def _plan(policy: PlannerPolicy, grid: Grid, field: CostField | None, start: Coord) -> PlanOutcome:
    if policy.kind is PlannerKind.SRAH:
        return astar_weighted(grid, field, start, grid.goal, policy.w)
    if policy.kind is PlannerKind.BFS_REPLAN:
        return bfs_shortest(grid, start, grid.goal)
    return greedy_best_first(grid, start, grid.goal)


def run_trial(
    grid: Grid,
    policy: PlannerPolicy,
    cfg: DynamicsConfig,
    t_max: int,
    rng: UniformSource,
    *,
    trial_id: int = 0,
    on_plan: PlanHook | None = None,
    trace: list[Coord] | None = None,
) -> TrialRecord:
    """Execute one closed-loop navigation trial.

    Each timestep spawns obstacles around the agent, then checks the next
    planned cell. A blocked next cell triggers a replan from the current cell
    (replanning policies) or ends the trial (greedy). Planning time covers
    every planner call and every risk-field computation.

    The grid is copied; the caller's grid is never mutated. ``on_plan`` sees
    the grid as it stood when each plan was made; ``trace`` receives every
    cell the agent occupies.
    """
    if t_max < 1:
        raise ConfigurationError(f"t_max must be >= 1, got {t_max}")
    grid = grid.copy()
    goal = grid.goal
    agent = grid.start
    planning_ns = 0
    replans = 0
    steps = 0
    field = None

    def finish(success: bool, reason: FailureReason) -> TrialRecord:
        return TrialRecord(
            trial_id=trial_id,
            planner=policy.kind,
            success=success,
            steps=steps,
            planning_time_ms=planning_ns / 1e6,
            replan_count=replans,
            failure_reason=reason,
        )

    def plan_from(cell: Coord) -> PlanOutcome:
        nonlocal planning_ns, field
        if policy.uses_semantic_cost:
            t0 = time.perf_counter_ns()
            field = compute_cost_field(grid)
            planning_ns += time.perf_counter_ns() - t0
        outcome = _plan(policy, grid, field, cell)
        planning_ns += outcome.elapsed_ns
        if on_plan is not None:
            on_plan(grid, outcome, cell)
        return outcome

    if trace is not None:
        trace.append(agent)
    outcome = plan_from(agent)
    if outcome.path is None:
        return finish(False, FailureReason.NO_INITIAL_PATH)
    path = outcome.path.cells
    pos = 0

    n = grid.n
    while agent != goal and steps < t_max:
        spawn_dynamic_obstacles(grid, agent, goal, cfg, rng)
        nxt = path[pos + 1]
        if grid.blocked[nxt.row * n + nxt.col]:
            if not policy.replans:
                return finish(False, FailureReason.BLOCKED_NO_RECOVERY)
            replans += 1
            outcome = plan_from(agent)
            if outcome.path is None:
                return finish(False, FailureReason.REPLAN_FAILED)
            path = outcome.path.cells
            pos = 0
            nxt = path[1]
        agent = nxt
        pos += 1
        steps += 1
        if trace is not None:
            trace.append(agent)

    if agent == goal:
        return finish(True, FailureReason.NONE)
    return finish(False, FailureReason.TIMEOUT)
