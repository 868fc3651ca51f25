"""Render experiment figures from the flat CSV exports.

Four figure kinds, each driven entirely by the data files:

* ``pole_histogram``: histograms of estimated pole magnitudes per group,
  with star markers at the true pole magnitudes (the ``series=true`` rows).
* ``hinf_boxplot``: box plots of a frequency-error column across groups,
  medians marked.
* ``hinf_histogram``: per-group histograms of a frequency-error column with
  the median starred and printed, quartiles ticked.
* ``bode``: per-channel magnitude responses, every estimated repeat as a
  light line over the true curve in black.

Annotation values (true poles, medians, quartiles) are always computed from
the CSV rows, never hard-coded.  Medians use the lower of two middles, the
same convention the experiment records document.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class MissingColumn(Exception):
    """An input CSV lacks a column the figure needs."""


class EmptyGroup(Exception):
    """A requested group has no data rows; nothing is written."""


VALID_KINDS = ("pole_histogram", "hinf_boxplot", "hinf_histogram", "bode")


@dataclass
class FigureSpec:
    """What to draw and from which file.

    ``group_by`` selects the grouping column (``Tbar`` or ``n``);
    ``value`` picks the error column for the two hinf kinds.
    """

    kind: str
    csv: str
    group_by: str = "Tbar"
    value: str = "hard_error"
    bins: int = 40
    magnitude_range: tuple[float, float] = (0.8, 1.0)
    annotate_true_poles: bool = True
    annotate_medians: bool = True

    def __post_init__(self):
        if self.kind not in VALID_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")

    @classmethod
    def from_file(cls, path) -> "FigureSpec":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown spec keys: {sorted(unknown)}")
        if "magnitude_range" in raw:
            raw["magnitude_range"] = tuple(raw["magnitude_range"])
        return cls(**raw)


@dataclass
class RenderResult:
    """Where the image went and which values were drawn."""

    path: str
    groups: list
    annotations: dict = field(default_factory=dict)
    data_series: dict = field(default_factory=dict)


def _read_rows(path, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        columns = reader.fieldnames or []
        for column in required:
            if column not in columns:
                raise MissingColumn(f"{path} has no column {column!r}")
        return list(reader)


def median_low(values: list[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def quartiles_low(values: list[float]) -> tuple[float, float, float]:
    ordered = sorted(values)
    k = len(ordered) - 1
    return ordered[k // 4], ordered[k // 2], ordered[(3 * k) // 4]


def _group_key(row: dict, column: str) -> float:
    try:
        return float(row[column])
    except ValueError as exc:
        raise MissingColumn(f"column {column!r} is not numeric") from exc


def render(spec: FigureSpec, out_path) -> RenderResult:
    """Draw the figure described by ``spec`` into ``out_path``.

    Raises MissingColumn or EmptyGroup before anything is written.
    """
    if spec.kind == "pole_histogram":
        result = _render_pole_histogram(spec, out_path)
    elif spec.kind == "hinf_boxplot":
        result = _render_hinf(spec, out_path, boxplot=True)
    elif spec.kind == "hinf_histogram":
        result = _render_hinf(spec, out_path, boxplot=False)
    else:
        result = _render_bode(spec, out_path)
    return result


def _render_pole_histogram(spec: FigureSpec, out_path) -> RenderResult:
    rows = _read_rows(spec.csv, ("series", "magnitude", spec.group_by))
    estimates: dict[float, list[float]] = {}
    true_poles: dict[float, list[float]] = {}
    for row in rows:
        key = _group_key(row, spec.group_by)
        mag = float(row["magnitude"])
        if row["series"] == "true":
            true_poles.setdefault(key, []).append(mag)
        else:
            estimates.setdefault(key, []).append(mag)
    if not estimates:
        raise EmptyGroup(f"{spec.csv} holds no estimated pole rows")
    groups = sorted(estimates)
    fig, axes = plt.subplots(len(groups), 1, figsize=(6, 2.2 * len(groups)), squeeze=False)
    annotations: dict = {}
    series: dict = {}
    for ax, key in zip(axes[:, 0], groups):
        counts, edges, _ = ax.hist(
            estimates[key], bins=spec.bins, range=spec.magnitude_range,
            color="tab:blue", alpha=0.8,
        )
        series[key] = counts.tolist()
        if spec.annotate_true_poles and key in true_poles:
            marks = sorted(set(true_poles[key]))
            top = counts.max() if counts.size else 1.0
            ax.plot(marks, [0.03 * max(top, 1.0)] * len(marks), "k*", markersize=11)
            annotations[key] = marks
        ax.set_ylabel("count")
        ax.set_title(f"{spec.group_by} = {_fmt_key(key)}", fontsize=10)
    axes[-1, 0].set_xlabel("pole magnitude")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return RenderResult(
        path=str(out_path), groups=groups, annotations=annotations, data_series=series
    )


def _render_hinf(spec: FigureSpec, out_path, boxplot: bool) -> RenderResult:
    rows = _read_rows(spec.csv, (spec.value, spec.group_by))
    by_group: dict[float, list[float]] = {}
    for row in rows:
        key = _group_key(row, spec.group_by)
        by_group.setdefault(key, []).append(float(row[spec.value]))
    if not by_group:
        raise EmptyGroup(f"{spec.csv} holds no error rows")
    groups = sorted(by_group)
    annotations = {key: median_low(by_group[key]) for key in groups}
    series = {key: sorted(by_group[key]) for key in groups}

    if boxplot:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.boxplot([by_group[key] for key in groups],
                   tick_labels=[_fmt_key(k) for k in groups])
        if spec.annotate_medians:
            ax.plot(range(1, len(groups) + 1), [annotations[k] for k in groups],
                    "k*", markersize=11)
        ax.set_xlabel(spec.group_by)
        ax.set_ylabel(spec.value)
    else:
        fig, axes = plt.subplots(len(groups), 1, figsize=(6, 2.2 * len(groups)),
                                 squeeze=False)
        for ax, key in zip(axes[:, 0], groups):
            values = by_group[key]
            counts, _, _ = ax.hist(values, bins=min(spec.bins, max(5, len(values))),
                                   color="tab:green", alpha=0.8)
            q1, med, q3 = quartiles_low(values)
            top = counts.max() if counts.size else 1.0
            if spec.annotate_medians:
                ax.plot([med], [0.05 * max(top, 1.0)], "k*", markersize=11)
                ax.text(0.98, 0.92, f"{med:.3g}", transform=ax.transAxes,
                        ha="right", va="top")
                ax.plot([q1, q1], [0, 0.12 * max(top, 1.0)], "k-", linewidth=1.5)
                ax.plot([q3, q3], [0, 0.12 * max(top, 1.0)], "k-", linewidth=1.5)
            ax.set_title(f"{spec.group_by} = {_fmt_key(key)}", fontsize=10)
            ax.set_ylabel("count")
        axes[-1, 0].set_xlabel(spec.value)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return RenderResult(
        path=str(out_path), groups=groups, annotations=annotations, data_series=series
    )


def _render_bode(spec: FigureSpec, out_path) -> RenderResult:
    rows = _read_rows(
        spec.csv, ("series", "channel", "omega", "magnitude_db", spec.group_by)
    )
    curves: dict = {}
    for row in rows:
        key = (
            _group_key(row, spec.group_by),
            int(row["channel"]),
            row["series"],
            row["repeat"],
        )
        curves.setdefault(key, []).append((float(row["omega"]), float(row["magnitude_db"])))
    if not any(k[2] == "estimate" for k in curves):
        raise EmptyGroup(f"{spec.csv} holds no estimated response rows")
    groups = sorted({k[0] for k in curves})
    channels = sorted({k[1] for k in curves})
    fig, axes = plt.subplots(
        len(groups), len(channels),
        figsize=(3.2 * len(channels), 2.6 * len(groups)),
        squeeze=False,
    )
    series_counts: dict = {}
    for gi, group in enumerate(groups):
        for ci, channel in enumerate(channels):
            ax = axes[gi, ci]
            n_est = 0
            for (g, ch, kind, _), points in curves.items():
                if g != group or ch != channel:
                    continue
                points = sorted(points)
                omega = [p[0] for p in points]
                mag = [p[1] for p in points]
                if kind == "estimate":
                    ax.plot(omega, mag, color="tab:orange", alpha=0.35, linewidth=0.8)
                    n_est += 1
            for (g, ch, kind, _), points in curves.items():
                if g == group and ch == channel and kind == "true":
                    points = sorted(points)
                    ax.plot([p[0] for p in points], [p[1] for p in points],
                            color="black", linewidth=1.6)
            series_counts[(group, channel)] = n_est
            ax.set_title(f"{spec.group_by}={_fmt_key(group)} ch{channel}", fontsize=9)
            if gi == len(groups) - 1:
                ax.set_xlabel("omega (rad/sample)")
            if ci == 0:
                ax.set_ylabel("magnitude (dB)")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return RenderResult(
        path=str(out_path),
        groups=groups,
        annotations={"channels": channels},
        data_series={f"{g}/{c}": n for (g, c), n in series_counts.items()},
    )


def _fmt_key(key: float) -> str:
    return str(int(key)) if float(key).is_integer() else f"{key:g}"
