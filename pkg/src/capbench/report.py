"""Aggregate per-task metric reports into score and delta tables.

Layout mirrors the published result tables: one row per run (model), one
R@1 column per task and direction, tasks in a fixed order so side-by-side
comparison against the reference tables is trivial. Deltas are computed
against the unperturbed "original" baseline at the emitted one-decimal
precision, in both absolute points and percent of baseline.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .perturb import ORIGINAL_TASK_ID
from .retrieval import DIRECTIONS, MetricsReport

TASK_ORDER: tuple[str, ...] = (
    ORIGINAL_TASK_ID,
    "obj_attr_removal",
    "obj_shift",
    "obj_replacement",
    "obj_partial",
    "act_removal",
    "act_negation",
    "act_replacement",
    "syn_removal",
    "shuffle",
    "reverse",
)

FORMATS = ("markdown", "csv", "json")


class ReportError(ValueError):
    pass


def round1(value: float) -> float:
    """Round to one decimal via integer tenths (no float drift)."""
    return int(round(value * 10)) / 10


def _task_sort_key(task_id: str):
    try:
        return (0, TASK_ORDER.index(task_id))
    except ValueError:
        return (1, task_id)


def ordered_tasks(task_ids: Iterable[str]) -> list[str]:
    return sorted(set(task_ids), key=_task_sort_key)


@dataclass
class RunComparison:
    """All metric reports of one run (one model/encoder), keyed by task and direction."""

    label: str
    reports: dict[tuple[str, str], MetricsReport] = field(default_factory=dict)

    def add(self, report: MetricsReport) -> None:
        self.reports[(report.task_id, report.direction)] = report

    def baseline(self, direction: str) -> MetricsReport:
        try:
            return self.reports[(ORIGINAL_TASK_ID, direction)]
        except KeyError:
            raise ReportError(
                f"run {self.label!r} has no {ORIGINAL_TASK_ID!r} baseline for {direction}"
            ) from None

    def task_ids(self) -> list[str]:
        return ordered_tasks(task for task, _ in self.reports)

    def directions(self) -> list[str]:
        present = {direction for _, direction in self.reports}
        return [d for d in DIRECTIONS if d in present]


@dataclass(frozen=True)
class DeltaEntry:
    task_id: str
    direction: str
    baseline_r1: float
    task_r1: float
    absolute_drop: float
    relative_drop: float | None


def delta_table(comp: RunComparison) -> list[DeltaEntry]:
    """One delta entry per non-baseline (task, direction), at 1-decimal precision."""
    entries: list[DeltaEntry] = []
    for direction in comp.directions():
        baseline = round1(comp.baseline(direction).r1)
        for task_id in comp.task_ids():
            if task_id == ORIGINAL_TASK_ID:
                continue
            report = comp.reports.get((task_id, direction))
            if report is None:
                continue
            score = round1(report.r1)
            drop = (int(round(baseline * 10)) - int(round(score * 10))) / 10
            relative = round1(100.0 * drop / baseline) if baseline > 0 else None
            entries.append(
                DeltaEntry(task_id, direction, baseline, score, drop, relative)
            )
    return entries


def _columns(comparisons: Sequence[RunComparison]) -> list[tuple[str, str]]:
    tasks = ordered_tasks(t for comp in comparisons for t, _ in comp.reports)
    present = {d for comp in comparisons for _, d in comp.reports}
    return [(d, t) for d in DIRECTIONS if d in present for t in tasks]


def _cell(comp: RunComparison, direction: str, task_id: str) -> float | None:
    report = comp.reports.get((task_id, direction))
    return None if report is None else round1(report.r1)


def emit(comparisons: Sequence[RunComparison], format: str = "markdown") -> str:
    """Render the R@1 score table for one or more runs."""
    if not comparisons:
        raise ReportError("nothing to emit")
    if format not in FORMATS:
        raise ReportError(f"unknown report format: {format!r}")
    columns = _columns(comparisons)

    if format == "json":
        payload = {
            "runs": [
                {
                    "label": comp.label,
                    "r1": {
                        f"{direction}:{task}": _cell(comp, direction, task)
                        for direction, task in columns
                    },
                }
                for comp in comparisons
            ]
        }
        return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"

    header = ["run", *(f"{d}:{t}" for d, t in columns)]
    rows = []
    for comp in comparisons:
        cells = [
            "-" if (value := _cell(comp, d, t)) is None else f"{value:.1f}"
            for d, t in columns
        ]
        rows.append([comp.label, *cells])

    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()

    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def emit_deltas(comparisons: Sequence[RunComparison], format: str = "markdown") -> str:
    """Render the drop-vs-baseline table for one or more runs."""
    if not comparisons:
        raise ReportError("nothing to emit")
    if format not in FORMATS:
        raise ReportError(f"unknown report format: {format!r}")

    if format == "json":
        payload = {
            "runs": [
                {
                    "label": comp.label,
                    "deltas": [entry.__dict__ for entry in delta_table(comp)],
                }
                for comp in comparisons
            ]
        }
        return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"

    header = ["run", "task", "direction", "baseline_r1", "task_r1", "drop", "drop_pct"]
    rows = []
    for comp in comparisons:
        for entry in delta_table(comp):
            rows.append(
                [
                    comp.label,
                    entry.task_id,
                    entry.direction,
                    f"{entry.baseline_r1:.1f}",
                    f"{entry.task_r1:.1f}",
                    f"{entry.absolute_drop:.1f}",
                    "-" if entry.relative_drop is None else f"{entry.relative_drop:.1f}",
                ]
            )

    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()

    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"
