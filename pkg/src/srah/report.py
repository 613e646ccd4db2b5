"""Serialisation of trial records, summaries, plot data and SVG charts.

Every writer is a deterministic function of its input. Timing columns can be
masked so reruns with the same seeds compare byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import os
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import IO, Sequence, Union
from xml.sax.saxutils import escape

from .errors import ConfigurationError
from .executor import FailureReason, PlannerKind, TrialRecord
from .harness import AggregateStats, aggregate, sort_records

Destination = Union[str, os.PathLike, IO[str], None]

TRIAL_COLUMNS = (
    "trial_id",
    "planner",
    "success",
    "steps",
    "planning_time_ms",
    "replan_count",
    "failure_reason",
    "grid_seed",
    "dynamics_seed",
    "rho",
    "p_dyn",
)

FIGURE_KINDS = ("success_bar", "steps_distribution", "overhead_scatter", "density_curves")

PLOT_COLUMNS = {
    "success_bar": ("planner", "success_pct"),
    "steps_distribution": ("planner", "steps"),
    "overhead_scatter": ("planner", "time_mean_ms", "mean_replans"),
    "density_curves": ("rho", "planner", "success_pct"),
}

DISPLAY_NAMES = {
    PlannerKind.BFS_REPLAN: "BFS + Replan",
    PlannerKind.GREEDY_FIXED: "Greedy (no replan)",
    PlannerKind.SRAH: "SRAH",
}

MASKED = "NA"


def fmt_fixed(value: float, places: int) -> str:
    """Round half up on the shortest decimal repr of ``value`` (0.565 at 2 places gives 0.57)."""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(repr(float(value))).quantize(q, rounding=ROUND_HALF_UP))


def fmt_pct(rate: float) -> str:
    return fmt_fixed(float(Decimal(repr(float(rate))) * 100), 1)


def _write_text(text: str, destination: Destination) -> str:
    if destination is None:
        return text
    if hasattr(destination, "write"):
        destination.write(text)
        return text
    path = Path(destination)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}", str(path)) from exc
    return text


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- trial CSV


def write_trials_csv(
    records: Sequence[TrialRecord],
    destination: Destination = None,
    *,
    mask_timing: bool = False,
) -> str:
    """Write one row per record, sorted by (planner, rho, trial_id). Returns the CSV text."""
    rows = []
    for r in sort_records(records):
        rows.append(
            (
                r.trial_id,
                r.planner.name,
                int(r.success),
                r.steps,
                MASKED if mask_timing else f"{r.planning_time_ms:.6f}",
                r.replan_count,
                r.failure_reason.value,
                r.grid_seed,
                r.dynamics_seed,
                repr(float(r.rho)),
                repr(float(r.p_dyn)),
            )
        )
    return _write_text(_csv_text(TRIAL_COLUMNS, rows), destination)


def read_trials_csv(source: str | os.PathLike | IO[str]) -> list[TrialRecord]:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != TRIAL_COLUMNS:
        raise ConfigurationError(f"unexpected trial CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        timing = row["planning_time_ms"]
        out.append(
            TrialRecord(
                trial_id=int(row["trial_id"]),
                planner=PlannerKind[row["planner"]],
                success=row["success"] == "1",
                steps=int(row["steps"]),
                planning_time_ms=float("nan") if timing == MASKED else float(timing),
                replan_count=int(row["replan_count"]),
                failure_reason=FailureReason(row["failure_reason"]),
                grid_seed=int(row["grid_seed"]),
                dynamics_seed=int(row["dynamics_seed"]),
                rho=float(row["rho"]),
                p_dyn=float(row["p_dyn"]),
            )
        )
    return out


# ---------------------------------------------------------------- summary


def summary_dict(stats: Sequence[AggregateStats], *, mask_timing: bool = False) -> dict:
    planners = []
    for s in stats:
        planners.append(
            {
                "planner": s.planner.label,
                "n_trials": s.n_trials,
                "n_success": s.n_success,
                "success_rate": s.success_rate,
                "success_pct": float(fmt_pct(s.success_rate)),
                "steps_mean": s.steps_mean,
                "steps_std": s.steps_std,
                "time_mean_ms": None if mask_timing else s.time_mean_ms,
                "time_std_ms": None if mask_timing else s.time_std_ms,
                "mean_replans": s.mean_replans,
            }
        )
    return {"planners": planners, "timing_masked": mask_timing}


def _mean_std(mean: float | None, std: float | None, places: int) -> str:
    if mean is None:
        return "-"
    if std is None:
        return fmt_fixed(mean, places)
    return f"{fmt_fixed(mean, places)}±{fmt_fixed(std, places)}"


def format_table(stats: Sequence[AggregateStats], *, mask_timing: bool = False) -> str:
    """Aligned text table with the columns of the paper-style main results table."""
    header = ("Planner", "Success (%)", "Steps", "Time (ms)", "Replans")
    rows = [header]
    for s in stats:
        time_cell = MASKED if mask_timing else _mean_std(s.time_mean_ms, s.time_std_ms, 2)
        rows.append(
            (
                DISPLAY_NAMES[s.planner],
                fmt_pct(s.success_rate),
                _mean_std(s.steps_mean, s.steps_std, 1),
                time_cell,
                fmt_fixed(s.mean_replans, 2),
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    lines = []
    for r in rows:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def write_summary(
    stats: Sequence[AggregateStats],
    json_destination: Destination = None,
    text_destination: Destination = None,
    *,
    mask_timing: bool = False,
) -> tuple[str, str]:
    """Write the machine-readable JSON summary and the aligned text table."""
    if not stats:
        raise ConfigurationError("summary needs statistics for at least one planner")
    doc = json.dumps(summary_dict(stats, mask_timing=mask_timing), indent=2, sort_keys=True) + "\n"
    table = format_table(stats, mask_timing=mask_timing)
    _write_text(doc, json_destination)
    _write_text(table, text_destination)
    return doc, table


# ---------------------------------------------------------------- plot data


def _is_stats(data) -> bool:
    return bool(data) and all(isinstance(d, AggregateStats) for d in data)


def plot_rows(data, figure_kind: str, *, mask_timing: bool = False) -> list[tuple]:
    """Rows for one figure, typed (planner labels as str, numbers as float/int).

    ``data`` is a record list, or an ``AggregateStats`` list for the
    success_bar and overhead_scatter kinds.
    """
    if figure_kind not in PLOT_COLUMNS:
        raise ConfigurationError(f"unknown figure kind {figure_kind!r}")
    data = list(data)
    stats_input = _is_stats(data)
    if figure_kind in ("success_bar", "overhead_scatter"):
        stats = data if stats_input else (aggregate(data) if data else [])
        if figure_kind == "success_bar":
            return [(s.planner.label, float(fmt_pct(s.success_rate))) for s in stats]
        return [
            (
                s.planner.label,
                None if mask_timing or s.time_mean_ms is None else float(fmt_fixed(s.time_mean_ms, 2)),
                float(fmt_fixed(s.mean_replans, 2)),
            )
            for s in stats
        ]
    if stats_input:
        raise ConfigurationError(f"{figure_kind} needs trial records, not aggregates")
    if figure_kind == "steps_distribution":
        return [(r.planner.label, r.steps) for r in sort_records(data) if r.success]
    # density_curves
    if any(r.p_dyn != 0 for r in data):
        raise ConfigurationError("density_curves needs ablation records (p_dyn = 0)")
    groups: dict[float, list[TrialRecord]] = {}
    for r in data:
        groups.setdefault(r.rho, []).append(r)
    rows = []
    for rho in sorted(groups):
        for s in aggregate(groups[rho]):
            rows.append((rho, s.planner.label, float(fmt_pct(s.success_rate))))
    return rows


_PLACES = {"success_pct": 1, "time_mean_ms": 2, "mean_replans": 2, "rho": 2}


def _cell(column: str, value) -> str:
    if value is None:
        return MASKED
    if column in _PLACES:
        return fmt_fixed(value, _PLACES[column])
    return str(value)


def emit_plot_data(
    data,
    figure_kind: str,
    destination: Destination = None,
    *,
    mask_timing: bool = False,
) -> str:
    """Write the plot-ready CSV for ``figure_kind``; returns its text."""
    rows = plot_rows(data, figure_kind, mask_timing=mask_timing)
    columns = PLOT_COLUMNS[figure_kind]
    text = _csv_text(columns, [[_cell(c, v) for c, v in zip(columns, row)] for row in rows])
    return _write_text(text, destination)


def read_plot_data(source: str | os.PathLike, figure_kind: str) -> list[tuple]:
    text = Path(source).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != PLOT_COLUMNS[figure_kind]:
        raise ConfigurationError(f"unexpected {figure_kind} header {header}")
    rows = []
    for raw in reader:
        row = []
        for name, value in zip(header, raw):
            if name == "planner":
                row.append(value)
            elif value == MASKED:
                row.append(None)
            elif name == "steps":
                row.append(int(value))
            else:
                row.append(float(value))
        rows.append(tuple(row))
    return rows


# ---------------------------------------------------------------- SVG

COLORS = {"BFS": "#4a90d9", "Greedy": "#8c8c8c", "SRAH": "#e8842c"}
_W, _H = 640, 400
_ML, _MR, _MT, _MB = 70, 30, 50, 60
_PW, _PH = _W - _ML - _MR, _H - _MT - _MB

TITLES = {
    "success_bar": ("Task success rate", "Planner", "Success (%)"),
    "steps_distribution": ("Steps to completion (successful trials)", "Planner", "Steps"),
    "overhead_scatter": ("Planning time vs. replan count", "Planning time (ms)", "Mean replans"),
    "density_curves": ("Success rate vs. obstacle density", "Obstacle density", "Success (%)"),
}


def _n(x: float) -> str:
    return f"{x:.2f}"


def _nice_max(value: float) -> float:
    if value <= 0:
        return 1.0
    mag = 10 ** len(str(int(value)))
    for step in (0.1, 0.2, 0.25, 0.5, 1.0):
        if value <= mag * step:
            return mag * step
    return float(mag)


def _color(label: str) -> str:
    return COLORS.get(label, "#444444")


def _frame(figure_kind: str, y_max: float, x_ticks: list[tuple[float, str]]) -> list[str]:
    title, x_label, y_label = TITLES[figure_kind]
    x0, y0 = _ML, _MT + _PH
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_W / 2:.2f}" y="28" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0 + _PW}" y2="{y0}" stroke="#000000"/>',
        f'<line class="axis" x1="{x0}" y1="{_MT}" x2="{x0}" y2="{y0}" stroke="#000000"/>',
        f'<text x="{x0 + _PW / 2:.2f}" y="{_H - 15}" text-anchor="middle">{escape(x_label)}</text>',
        f'<text x="18" y="{_MT + _PH / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_MT + _PH / 2:.2f})">{escape(y_label)}</text>',
    ]
    for i in range(6):
        v = y_max * i / 5
        y = y0 - _PH * i / 5
        out.append(f'<line x1="{x0 - 4}" y1="{_n(y)}" x2="{x0}" y2="{_n(y)}" stroke="#000000"/>')
        out.append(f'<text x="{x0 - 8}" y="{_n(y + 4)}" text-anchor="end">{fmt_fixed(v, 1)}</text>')
    for x, label in x_ticks:
        out.append(f'<line x1="{_n(x)}" y1="{y0}" x2="{_n(x)}" y2="{y0 + 4}" stroke="#000000"/>')
        out.append(f'<text x="{_n(x)}" y="{y0 + 18}" text-anchor="middle">{escape(label)}</text>')
    return out


def _planner_order(labels) -> list[str]:
    order = [k.label for k in PlannerKind]
    return sorted(set(labels), key=lambda s: (order.index(s) if s in order else len(order), s))


def _planner_slots(labels: Sequence[str]) -> dict[str, float]:
    present = _planner_order(labels)
    step = _PW / max(len(present), 1)
    return {lab: _ML + step * (i + 0.5) for i, lab in enumerate(present)}


def emit_svg_chart(rows: Sequence[tuple], figure_kind: str, destination: Destination = None) -> str:
    """Standalone SVG with axes, labels and one mark per data row."""
    if figure_kind not in PLOT_COLUMNS:
        raise ConfigurationError(f"unknown figure kind {figure_kind!r}")
    y0 = _MT + _PH
    body: list[str] = []

    if figure_kind == "success_bar":
        slots = _planner_slots([r[0] for r in rows])
        y_max = 100.0
        frame = _frame(figure_kind, y_max, [(x, lab) for lab, x in slots.items()])
        bar_w = _PW / max(len(slots), 1) * 0.5
        for label, pct in rows:
            h = _PH * pct / y_max
            x = slots[label] - bar_w / 2
            body.append(
                f'<rect class="bar" x="{_n(x)}" y="{_n(y0 - h)}" width="{_n(bar_w)}" '
                f'height="{_n(h)}" fill="{_color(label)}"/>'
            )
            body.append(
                f'<text x="{_n(slots[label])}" y="{_n(y0 - h - 6)}" text-anchor="middle">'
                f"{fmt_fixed(pct, 1)}</text>"
            )

    elif figure_kind == "steps_distribution":
        slots = _planner_slots([r[0] for r in rows])
        y_max = _nice_max(max((r[1] for r in rows), default=0))
        frame = _frame(figure_kind, y_max, [(x, lab) for lab, x in slots.items()])
        span = _PW / max(len(slots), 1) * 0.6
        for i, (label, steps) in enumerate(rows):
            # deterministic jitter from the row index
            jitter = ((i * 2654435761) % 1000) / 1000 - 0.5
            x = slots[label] + jitter * span
            y = y0 - _PH * steps / y_max
            body.append(
                f'<circle class="mark" cx="{_n(x)}" cy="{_n(y)}" r="2" '
                f'fill="{_color(label)}" fill-opacity="0.5"/>'
            )

    elif figure_kind == "overhead_scatter":
        x_max = _nice_max(max((r[1] or 0.0 for r in rows), default=0))
        y_max = _nice_max(max((r[2] for r in rows), default=0))
        ticks = [(_ML + _PW * i / 5, fmt_fixed(x_max * i / 5, 2)) for i in range(6)]
        frame = _frame(figure_kind, y_max, ticks)
        for label, t_ms, replans in rows:
            x = _ML + _PW * (t_ms or 0.0) / x_max
            y = y0 - _PH * replans / y_max
            body.append(f'<circle class="mark" cx="{_n(x)}" cy="{_n(y)}" r="6" fill="{_color(label)}"/>')
            body.append(f'<text x="{_n(x + 9)}" y="{_n(y - 9)}">{escape(label)}</text>')

    else:  # density_curves
        rhos = sorted({r[0] for r in rows})
        lo, hi = (rhos[0], rhos[-1]) if rhos else (0.0, 1.0)
        width = (hi - lo) or 1.0

        def xpos(rho: float) -> float:
            if len(rhos) <= 1:
                return _ML + _PW / 2
            return _ML + _PW * 0.05 + _PW * 0.9 * (rho - lo) / width

        y_max = 100.0
        frame = _frame(figure_kind, y_max, [(xpos(r), fmt_fixed(r, 2)) for r in rhos])
        series: dict[str, list[tuple[float, float]]] = {}
        for rho, label, pct in rows:
            series.setdefault(label, []).append((xpos(rho), y0 - _PH * pct / y_max))
        for label in _planner_order(series):
            pts = " ".join(f"{_n(x)},{_n(y)}" for x, y in series[label])
            body.append(
                f'<polyline class="series" points="{pts}" fill="none" '
                f'stroke="{_color(label)}" stroke-width="2"/>'
            )
            for x, y in series[label]:
                body.append(f'<circle class="mark" cx="{_n(x)}" cy="{_n(y)}" r="4" fill="{_color(label)}"/>')
        for i, label in enumerate(_planner_order(series)):
            ly = _MT + 14 * i
            body.append(f'<rect x="{_ML + _PW - 110}" y="{ly - 9}" width="10" height="10" fill="{_color(label)}"/>')
            body.append(f'<text x="{_ML + _PW - 95}" y="{ly}">{escape(label)}</text>')

    svg = "\n".join(frame + body + ["</svg>"]) + "\n"
    return _write_text(svg, destination)
