"""Experiment orchestration and Table-1-style aggregation."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import ConfigurationError
from .executor import (
    DynamicsConfig,
    PlanHook,
    PlannerKind,
    PlannerPolicy,
    TrialRecord,
    default_policies,
    run_trial,
)
from .grid import sample_grid
from .rng import TAG_DYNAMICS, SeedStream, derive_seed

DEFAULT_DENSITIES = (0.10, 0.15, 0.20, 0.25, 0.30)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 15
    rho: float = 0.20
    p_dyn: float = 0.06
    trials: int = 200
    t_max: int = 300
    base_seed: int = 0
    densities: tuple[float, ...] = DEFAULT_DENSITIES
    ablation_trials: int = 80
    w: float = 1.2

    def __post_init__(self) -> None:
        object.__setattr__(self, "densities", tuple(float(d) for d in self.densities))
        if self.n < 2:
            raise ConfigurationError(f"n must be >= 2, got {self.n}")
        for name in ("trials", "t_max", "ablation_trials"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigurationError(f"rho must lie in [0, 1], got {self.rho}")
        if not 0.0 <= self.p_dyn <= 1.0:
            raise ConfigurationError(f"p_dyn must lie in [0, 1], got {self.p_dyn}")
        if self.w < 1:
            raise ConfigurationError(f"w must be >= 1, got {self.w}")
        if not self.densities:
            raise ConfigurationError("densities must not be empty")
        if any(not 0.0 <= d <= 1.0 for d in self.densities):
            raise ConfigurationError(f"densities must lie in [0, 1], got {self.densities}")
        if any(b <= a for a, b in zip(self.densities, self.densities[1:])):
            raise ConfigurationError(f"densities must be strictly increasing, got {self.densities}")

    def with_overrides(self, **changes) -> ExperimentConfig:
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass(frozen=True)
class AggregateStats:
    planner: PlannerKind
    n_trials: int
    n_success: int
    success_rate: float
    steps_mean: float | None
    steps_std: float | None
    time_mean_ms: float | None
    time_std_ms: float | None
    mean_replans: float


def dynamics_seed(base_seed: int, trial_index: int) -> int:
    return derive_seed(base_seed, trial_index, TAG_DYNAMICS)


@dataclass(frozen=True)
class _TrialJob:
    trial_id: int
    n: int
    rho: float
    grid_seed: int
    dyn_seed: int
    p_dyn: float
    t_max: int
    policies: tuple[PlannerPolicy, ...] = field(default_factory=tuple)


def _run_job(job: _TrialJob, on_plan: PlanHook | None = None) -> list[TrialRecord]:
    grid = sample_grid(job.n, job.rho, job.grid_seed)
    dyn = DynamicsConfig(job.p_dyn)
    out = []
    for policy in job.policies:
        # every planner sees the same starting grid and a fresh, identically seeded stream
        rec = run_trial(
            grid,
            policy,
            dyn,
            job.t_max,
            SeedStream(job.dyn_seed),
            trial_id=job.trial_id,
            on_plan=on_plan,
        )
        out.append(
            replace(
                rec,
                grid_seed=job.grid_seed,
                dynamics_seed=job.dyn_seed,
                rho=job.rho,
                p_dyn=job.p_dyn,
            )
        )
    return out


def sort_records(records: Iterable[TrialRecord]) -> list[TrialRecord]:
    return sorted(records, key=lambda r: (r.planner.order, r.rho, r.trial_id))


def _execute(jobs: list[_TrialJob], n_jobs: int, on_plan: PlanHook | None) -> list[TrialRecord]:
    records: list[TrialRecord] = []
    if n_jobs > 1 and on_plan is None:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            for batch in pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * n_jobs))):
                records.extend(batch)
    else:
        for job in jobs:
            records.extend(_run_job(job, on_plan))
    return sort_records(records)


def run_main_experiment(
    cfg: ExperimentConfig,
    *,
    policies: Sequence[PlannerPolicy] | None = None,
    n_jobs: int = 1,
    on_plan: PlanHook | None = None,
) -> list[TrialRecord]:
    """One grid per trial (seed = base_seed + trial index), every planner run on it."""
    policies = tuple(policies or default_policies(cfg.w))
    jobs = [
        _TrialJob(
            trial_id=i,
            n=cfg.n,
            rho=cfg.rho,
            grid_seed=cfg.base_seed + i,
            dyn_seed=dynamics_seed(cfg.base_seed, i),
            p_dyn=cfg.p_dyn,
            t_max=cfg.t_max,
            policies=policies,
        )
        for i in range(cfg.trials)
    ]
    return _execute(jobs, n_jobs, on_plan)


def run_density_ablation(
    cfg: ExperimentConfig,
    *,
    policies: Sequence[PlannerPolicy] | None = None,
    n_jobs: int = 1,
    on_plan: PlanHook | None = None,
) -> list[TrialRecord]:
    """Static-only runs (p_dyn = 0) for each density, with disjoint grid seeds per density."""
    policies = tuple(policies or default_policies(cfg.w))
    jobs = []
    for d_idx, rho in enumerate(cfg.densities):
        for t in range(cfg.ablation_trials):
            seed = cfg.base_seed + d_idx * cfg.ablation_trials + t
            jobs.append(
                _TrialJob(
                    trial_id=t,
                    n=cfg.n,
                    rho=rho,
                    grid_seed=seed,
                    dyn_seed=dynamics_seed(cfg.base_seed, d_idx * cfg.ablation_trials + t),
                    p_dyn=0.0,
                    t_max=cfg.t_max,
                    policies=policies,
                )
            )
    return _execute(jobs, n_jobs, on_plan)


def _summarise(planner: PlannerKind, recs: list[TrialRecord]) -> AggregateStats:
    steps = [r.steps for r in recs if r.success]
    times = [r.planning_time_ms for r in recs]
    n = len(recs)
    return AggregateStats(
        planner=planner,
        n_trials=n,
        n_success=len(steps),
        success_rate=len(steps) / n,
        steps_mean=statistics.fmean(steps) if steps else None,
        steps_std=statistics.stdev(steps) if len(steps) >= 2 else None,
        time_mean_ms=statistics.fmean(times),
        time_std_ms=statistics.stdev(times) if n >= 2 else None,
        mean_replans=statistics.fmean(r.replan_count for r in recs),
    )


def aggregate(records: Sequence[TrialRecord]) -> list[AggregateStats]:
    """Per-planner statistics, in canonical planner order.

    Step statistics cover successful trials only; the standard deviations
    are sample (n - 1) estimates and are ``None`` below two observations.
    """
    if not records:
        raise ConfigurationError("cannot aggregate an empty record set")
    by_planner: dict[PlannerKind, list[TrialRecord]] = {}
    # sort first so float sums do not depend on input order
    for r in sort_records(records):
        by_planner.setdefault(r.planner, []).append(r)
    return [_summarise(k, by_planner[k]) for k in PlannerKind if k in by_planner]


def aggregate_by_density(records: Sequence[TrialRecord]) -> dict[float, list[AggregateStats]]:
    groups: dict[float, list[TrialRecord]] = {}
    for r in records:
        groups.setdefault(r.rho, []).append(r)
    return {rho: aggregate(groups[rho]) for rho in sorted(groups)}
