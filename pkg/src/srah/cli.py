"""Command-line entry point: ``srah run-main | ablate | plan | render-demo``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import report
from .cost import compute_cost_field
from .errors import ConfigurationError
from .executor import PlannerKind
from .grid import render_ascii, sample_grid
from .harness import (
    ExperimentConfig,
    aggregate,
    aggregate_by_density,
    run_density_ablation,
    run_main_experiment,
)
from .planners import astar_weighted, bfs_shortest, greedy_best_first, path_cost_tenths

CONFIG_KEYS = {
    "n", "rho", "p_dyn", "trials", "t_max", "base_seed", "densities", "ablation_trials", "w",
}


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {value}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _densities(text: str) -> tuple[float, ...]:
    return tuple(_unit_interval(part) for part in text.split(",") if part.strip())


def _weight(text: str) -> float:
    value = float(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"heuristic weight must be >= 1, got {value}")
    return value


def _tenths(t: int) -> str:
    return f"{t // 10}.{t % 10}"


def _experiment_flags(p: argparse.ArgumentParser, default_out: str) -> None:
    p.add_argument("--config", type=Path, help="JSON file of ExperimentConfig keys")
    p.add_argument("--n", type=int, help="grid side length (default 15)")
    p.add_argument("--rho", type=_unit_interval, help="static obstacle density (default 0.20)")
    p.add_argument("--p-dyn", type=_unit_interval, help="dynamic spawn probability (default 0.06)")
    p.add_argument("--trials", type=_positive_int, help="main-experiment trials (default 200)")
    p.add_argument("--t-max", type=_positive_int, help="step budget per trial (default 300)")
    p.add_argument("--seed", type=int, help="base seed; grid seed = base + trial index (default 0)")
    p.add_argument("--densities", type=_densities, help="comma-separated ablation densities")
    p.add_argument("--ablation-trials", type=_positive_int, help="trials per density (default 80)")
    p.add_argument("--weight", type=_weight, help="SRAH heuristic weight (default 1.2)")
    p.add_argument("--out-dir", type=Path, default=Path(default_out))
    p.add_argument(
        "--format",
        choices=("ascii", "json", "csv", "svg"),
        default="ascii",
        help="what to echo on stdout: table, summary JSON, trials CSV or chart SVG",
    )
    p.add_argument("--mask-timing", action="store_true", help="blank timing columns for byte-stable output")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srah", description="Semantic risk-aware grid planner benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    _experiment_flags(sub.add_parser("run-main", help="planner comparison under dynamic obstacles"), "results/main")
    _experiment_flags(sub.add_parser("ablate", help="static obstacle-density sweep"), "results/ablation")

    plan = sub.add_parser("plan", help="sample one grid, plan once and render it")
    plan.add_argument("--n", type=int, default=12)
    plan.add_argument("--rho", type=_unit_interval, default=0.2)
    plan.add_argument("--seed", type=int, default=0)
    plan.add_argument("--planner", default="srah", choices=("srah", "bfs", "greedy"))
    plan.add_argument("--weight", type=_weight, default=1.2)
    plan.add_argument("--format", choices=("ascii", "json"), default="ascii")

    demo = sub.add_parser("render-demo", help="BFS and SRAH paths on the same grid")
    demo.add_argument("--n", type=int, default=12)
    demo.add_argument("--rho", type=_unit_interval, default=0.2)
    demo.add_argument("--seed", type=int, default=42)
    demo.add_argument("--weight", type=_weight, default=1.2)
    demo.add_argument("--format", choices=("ascii", "json"), default="ascii")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Defaults, then the config file, then command-line flags."""
    cfg = ExperimentConfig()
    if args.config is not None:
        data = json.loads(args.config.read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ConfigurationError(f"{args.config}: expected a JSON object")
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise ConfigurationError(f"{args.config}: unknown keys {sorted(unknown)}")
        if "densities" in data:
            data["densities"] = tuple(data["densities"])
        cfg = cfg.with_overrides(**data)
    return cfg.with_overrides(
        n=args.n,
        rho=args.rho,
        p_dyn=args.p_dyn,
        trials=args.trials,
        t_max=args.t_max,
        base_seed=args.seed,
        densities=args.densities,
        ablation_trials=args.ablation_trials,
        w=args.weight,
    )


def _prepare_out_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create output directory {path}: {exc.strerror}") from exc


def cmd_run_main(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    out: Path = args.out_dir
    _prepare_out_dir(out)
    mask = args.mask_timing
    records = run_main_experiment(cfg, n_jobs=args.jobs)
    stats = aggregate(records)

    trials_csv = report.write_trials_csv(records, out / "trials.csv", mask_timing=mask)
    doc, table = report.write_summary(stats, out / "summary.json", out / "summary.txt", mask_timing=mask)
    report.emit_plot_data(stats, "success_bar", out / "fig_success.csv")
    report.emit_plot_data(records, "steps_distribution", out / "fig_steps.csv")
    report.emit_plot_data(stats, "overhead_scatter", out / "fig_overhead.csv", mask_timing=mask)
    success_svg = report.emit_svg_chart(
        report.plot_rows(stats, "success_bar"), "success_bar", out / "fig_success.svg"
    )
    report.emit_svg_chart(
        report.plot_rows(stats, "overhead_scatter", mask_timing=mask),
        "overhead_scatter",
        out / "fig_overhead.svg",
    )
    _echo(args.format, table=table, doc=doc, csv_text=trials_csv, svg=success_svg)
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg = resolve_config(args)
    out: Path = args.out_dir
    _prepare_out_dir(out)
    mask = args.mask_timing
    records = run_density_ablation(cfg, n_jobs=args.jobs)

    trials_csv = report.write_trials_csv(records, out / "trials.csv", mask_timing=mask)
    per_density = aggregate_by_density(records)
    doc = {
        "densities": [
            {"rho": rho, **report.summary_dict(stats, mask_timing=mask)}
            for rho, stats in per_density.items()
        ]
    }
    doc_text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    table = "".join(
        f"rho = {report.fmt_fixed(rho, 2)}\n{report.format_table(stats, mask_timing=mask)}\n"
        for rho, stats in per_density.items()
    )
    (out / "summary.json").write_text(doc_text, encoding="utf-8")
    (out / "summary.txt").write_text(table, encoding="utf-8")
    report.emit_plot_data(records, "density_curves", out / "fig_density.csv")
    svg = report.emit_svg_chart(
        report.plot_rows(records, "density_curves"), "density_curves", out / "fig_density.svg"
    )
    _echo(args.format, table=table, doc=doc_text, csv_text=trials_csv, svg=svg)
    return 0


def _echo(fmt: str, *, table: str, doc: str, csv_text: str, svg: str) -> None:
    sys.stdout.write({"ascii": table, "json": doc, "csv": csv_text, "svg": svg}[fmt])


def _plan_once(kind: PlannerKind, grid, field, w: float):
    if kind is PlannerKind.SRAH:
        return astar_weighted(grid, field, grid.start, grid.goal, w)
    if kind is PlannerKind.BFS_REPLAN:
        return bfs_shortest(grid, grid.start, grid.goal)
    return greedy_best_first(grid, grid.start, grid.goal)


def _plan_summary(kind: PlannerKind, outcome, field) -> dict:
    if outcome.path is None:
        return {"planner": kind.label, "found": False}
    cells = outcome.path.cells
    return {
        "planner": kind.label,
        "found": True,
        "steps": len(cells) - 1,
        "semantic_cost": _tenths(path_cost_tenths(cells, field)),
        "risk_cells_on_path": sum(1 for c in cells if field.phi(c) > 0),
        "nodes_expanded": outcome.nodes_expanded,
        "path": [list(c) for c in cells],
    }


def _describe(summary: dict) -> str:
    if not summary["found"]:
        return f"planner: {summary['planner']}  NO PATH"
    return (
        f"planner: {summary['planner']}  steps: {summary['steps']}  "
        f"semantic cost: {summary['semantic_cost']}  risk cells on path: "
        f"{summary['risk_cells_on_path']}  nodes expanded: {summary['nodes_expanded']}"
    )


def cmd_plan(args: argparse.Namespace) -> int:
    grid = sample_grid(args.n, args.rho, args.seed)
    field = compute_cost_field(grid)
    kind = PlannerKind.parse(args.planner)
    outcome = _plan_once(kind, grid, field, args.weight)
    summary = _plan_summary(kind, outcome, field)
    if args.format == "json":
        print(json.dumps(summary, sort_keys=True))
        return 0
    print(render_ascii(grid, outcome.path.cells if outcome.path else None, field))
    print(_describe(summary))
    return 0


def cmd_render_demo(args: argparse.Namespace) -> int:
    grid = sample_grid(args.n, args.rho, args.seed)
    field = compute_cost_field(grid)
    summaries = []
    blocks = []
    for kind in (PlannerKind.BFS_REPLAN, PlannerKind.SRAH):
        outcome = _plan_once(kind, grid, field, args.weight)
        summary = _plan_summary(kind, outcome, field)
        summaries.append(summary)
        blocks.append(
            render_ascii(grid, outcome.path.cells if outcome.path else None, field)
            + "\n"
            + _describe(summary)
        )
    if args.format == "json":
        print(json.dumps(summaries, sort_keys=True))
    else:
        print("\n\n".join(blocks))
    return 0


COMMANDS = {
    "run-main": cmd_run_main,
    "ablate": cmd_ablate,
    "plan": cmd_plan,
    "render-demo": cmd_render_demo,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigurationError as exc:
        parser.error(str(exc))
    except OSError as exc:
        print(f"srah: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
