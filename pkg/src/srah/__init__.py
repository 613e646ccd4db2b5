"""Semantic risk-aware grid planning with closed-loop replanning, plus baselines and benchmarks."""

from .cost import CostField, compute_cost_field, step_cost
from .errors import ConfigurationError, ContractViolation
from .executor import (
    DynamicsConfig,
    FailureReason,
    PlannerKind,
    PlannerPolicy,
    TrialRecord,
    run_trial,
    spawn_dynamic_obstacles,
)
from .grid import (
    Coord,
    Grid,
    blocked_adjacency8,
    is_free,
    manhattan,
    neighbors4,
    render_ascii,
    sample_grid,
    set_blocked,
)
from .harness import (
    AggregateStats,
    ExperimentConfig,
    aggregate,
    run_density_ablation,
    run_main_experiment,
)
from .planners import (
    Path,
    PlanOutcome,
    astar_weighted,
    bfs_shortest,
    dijkstra_oracle,
    greedy_best_first,
    validate_path,
)
from .rng import SeedStream

__version__ = "0.1.0"
